//! Exhaustive verification sweeps over the fixture catalog. Every suite
//! returns a [`SuiteReport`] whose JSON form is deterministic.

use qlogic_core::cloning::{
    classical_cloner, clone_search_many, is_cloning_transformation, theorem1_certificate,
    CloneContext, CloneProblem,
};
use qlogic_core::compat::Budget;
use qlogic_core::composite::{check_lemma2, check_lemma3, CompositeLogic};
use qlogic_core::hilbert::{self, PureVector, DEFAULT_TOLERANCE, EXACT_TOLERANCE};
use qlogic_core::morphisms::{
    check_lemma1a, check_lemma1b, Automorphism, Morphism, DEFAULT_AUTOMORPHISM_BUDGET,
};
use qlogic_core::rational::{self, to_pq};
use qlogic_core::state::{ConditionG, ConditionalKind, State, StateConfig, StatePolytope};
use qlogic_core::{Axiom, Element, Error, FiniteLogic, Rational};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Result;
use crate::fixtures::{fixture_automorphisms, Catalog, Fixture};
use crate::sweep;

pub const BOOLEAN_FIXTURES: [&str; 4] = ["boolean1", "boolean2", "boolean3", "boolean4"];
pub const VALID_FIXTURES: [&str; 7] = [
    "boolean1", "boolean2", "boolean3", "boolean4", "MO1", "MO2", "MO3",
];
pub const MORPHISM_FIXTURES: [&str; 3] = ["embed_b2_b3", "embed_b2_mo2", "embed_mo1_mo2"];
pub const PRODUCT_FIXTURES: [&str; 2] = ["prod22", "prod33"];

const MAX_RECORDED_FAILURES: usize = 20;

/// Number of checks run and the failure messages.
pub type Sweep = (u64, Vec<String>);

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub passed: bool,
    pub checks: u64,
    pub failures: Vec<String>,
    pub detail: Value,
}

impl SuiteReport {
    pub fn to_json(&self) -> String {
        crate::format::to_json_string(self)
    }
}

#[derive(Default)]
struct Tally {
    checks: u64,
    failed: u64,
    failures: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, message: impl FnOnce() -> String) -> bool {
        self.checks += 1;
        if !ok {
            self.failed += 1;
            if self.failures.len() < MAX_RECORDED_FAILURES {
                self.failures.push(message());
            }
        }
        ok
    }

    fn fail(&mut self, message: String) {
        self.check(false, || message);
    }

    fn finish(self, name: &str, detail: Value) -> SuiteReport {
        SuiteReport {
            name: name.into(),
            passed: self.failed == 0,
            checks: self.checks,
            failures: self.failures,
            detail,
        }
    }
}

pub fn state_json(s: &State) -> Value {
    json!(s.values().iter().map(to_pq).collect::<Vec<_>>())
}

fn opt_pq(x: Option<&Rational>) -> Value {
    x.map_or(Value::Null, |r| Value::String(to_pq(r)))
}

/// Validation accepts the Boolean and `MO_n` fixtures and rejects `O6`
/// with an orthomodular-law witness.
pub fn axiom_gate(cat: &Catalog) -> Result<SuiteReport> {
    let mut t = Tally::default();
    let mut rows = Vec::new();
    for name in VALID_FIXTURES {
        let ok = matches!(cat.load(name)?, Fixture::Logic { logic: Some(_), .. });
        t.check(ok, || format!("{name} was rejected"));
        rows.push(json!({"fixture": name, "valid": ok}));
    }
    let Fixture::Logic { description, .. } = cat.load("O6")? else {
        unreachable!("O6 is a logic fixture")
    };
    match crate::format::LoadedLogic::from_description(&description) {
        Err(crate::error::FormatError::Logic(Error::AxiomViolation { axiom, e, f })) => {
            t.check(axiom == Axiom::E, || {
                format!("O6 fails axiom ({axiom}), expected (E)")
            });
            rows.push(json!({
                "fixture": "O6",
                "valid": false,
                "axiom": axiom.to_string(),
                "witness": [description.labels[e], description.labels[f]],
            }));
        }
        other => t.fail(format!("O6 was not rejected by an axiom: {other:?}")),
    }
    Ok(t.finish("axiom gate", json!(rows)))
}

/// `(G)` on one logic: a report row and whether it holds. Failing
/// witnesses are re-verified.
pub fn condition_g_row(
    name: &str,
    logic: &FiniteLogic,
    poly: &StatePolytope,
) -> (Value, bool, Option<String>) {
    match poly.check_condition_g() {
        ConditionG::Holds => (json!({"fixture": name, "holds": true}), true, None),
        ConditionG::NonUnique {
            given,
            first,
            second,
        } => {
            let sound = first != second
                && State::new(logic, first.values().to_vec()).is_ok()
                && State::new(logic, second.values().to_vec()).is_ok()
                && *first.value(given) == rational::one()
                && *second.value(given) == rational::one();
            let row = json!({
                "fixture": name,
                "holds": false,
                "reason": "non-unique",
                "given": logic.label(given),
                "first": state_json(&first),
                "second": state_json(&second),
            });
            (
                row,
                false,
                (!sound).then(|| format!("{name}: non-uniqueness witness does not verify")),
            )
        }
        ConditionG::NonExistent { given, vertex } => (
            json!({"fixture": name, "holds": false, "reason": "non-existent", "given": logic.label(given), "vertex": state_json(&vertex)}),
            false,
            None,
        ),
    }
}

/// `(G)` holds on every Boolean fixture and fails on `MO2` with two
/// distinct conditional states.
pub fn condition_g_landscape(cat: &Catalog) -> Result<SuiteReport> {
    let mut t = Tally::default();
    let mut rows = Vec::new();
    for name in BOOLEAN_FIXTURES.iter().chain(&["MO2"]) {
        let logic = cat.load_logic(name)?;
        let poly = StatePolytope::new(&logic, &StateConfig::default())?;
        let (row, holds, unsound) = condition_g_row(name, &logic, &poly);
        let expected = *name != "MO2";
        t.check(holds == expected, || {
            format!("{name}: (G) holds = {holds}, expected {expected}")
        });
        if let Some(msg) = unsound {
            t.fail(msg);
        }
        if *name == "MO2" {
            t.check(row["reason"] == "non-unique", || {
                "MO2 fails (G) without a non-uniqueness witness".into()
            });
        }
        rows.push(row);
    }
    Ok(t.finish("conditional-probability landscape", json!(rows)))
}

/// Conditioning on a Boolean logic agrees with `ρ(f ∧ e)/ρ(e)` for every
/// vertex (and the barycenter) and every `e` of positive probability.
pub fn classical_equivalence(cat: &Catalog) -> Result<SuiteReport> {
    let mut t = Tally::default();
    let mut rows = Vec::new();
    for name in BOOLEAN_FIXTURES {
        let logic = cat.load_logic(name)?;
        let poly = StatePolytope::new(&logic, &StateConfig::default())?;
        let n = poly.vertices().len();
        let w = Rational::new(1.into(), (n as i64).into());
        let barycenter = State::combination(logic.len(), poly.vertices().iter().map(|v| (v, &w)));
        let states: Vec<&State> = poly.vertices().iter().chain([&barycenter]).collect();
        let before = t.checks;
        for rho in states {
            for e in logic.elements() {
                if *rho.value(e) == rational::zero() {
                    continue;
                }
                let r = poly.conditional_probability(rho, e)?;
                let ConditionalKind::Unique(mu) = &r.kind else {
                    t.fail(format!(
                        "{name}: conditional on {} is not unique",
                        logic.label(e)
                    ));
                    continue;
                };
                for f in logic.elements() {
                    let expected = rho.value(logic.inf(f, e)?) / rho.value(e);
                    t.check(*mu.value(f) == expected, || {
                        format!(
                            "{name}: ρ({}|{}) = {}, ratio {}",
                            logic.label(f),
                            logic.label(e),
                            to_pq(mu.value(f)),
                            to_pq(&expected)
                        )
                    });
                }
            }
        }
        rows.push(json!({"fixture": name, "vertices": n, "checks": t.checks - before}));
    }
    Ok(t.finish("classical equivalence", json!(rows)))
}

/// Lemma 1(a) over every event pair with a defined transition probability
/// and, for automorphisms, Lemma 1(b) over every atom with a unique atomic
/// state.
pub fn lemma1_sweep(
    source: &StatePolytope,
    target: &StatePolytope,
    t: &Morphism,
    aut: Option<&Automorphism>,
) -> Result<Sweep> {
    let mut tally = Tally::default();
    let logic = source.logic();
    for e1 in logic.elements() {
        for e2 in logic.elements() {
            match source.transition_probability(e2, e1) {
                Ok(p) if p.exists() => {}
                Ok(_) | Err(Error::Undefined(_)) => continue,
                Err(e) => return Err(e.into()),
            }
            match check_lemma1a(source, target, t, e1, e2) {
                Ok(r) => {
                    tally.check(r.source == r.target, || "report sides differ".into());
                }
                Err(err @ Error::LemmaViolated { .. }) => {
                    tally.fail(format!("({}, {}): {err}", logic.label(e1), logic.label(e2)))
                }
                Err(err) => return Err(err.into()),
            }
        }
    }
    if let Some(a) = aut {
        for &f in logic.atoms() {
            // Lemma 1(b) speaks about atomic states, so it needs them unique.
            if source.atomic_state(f).is_err() {
                continue;
            }
            match check_lemma1b(source, a, f) {
                Ok(_) => {
                    tally.check(true, String::new);
                }
                Err(err @ Error::LemmaViolated { .. }) => {
                    tally.fail(format!("atom {}: {err}", logic.label(f)))
                }
                Err(err) => return Err(err.into()),
            }
        }
    }
    Ok((tally.checks, tally.failures))
}

fn map_json(m: &Morphism) -> Value {
    json!(m.map().iter().map(|e| e.index()).collect::<Vec<_>>())
}

/// Lemma 1 over the morphism fixtures and every automorphism of `2^3` and
/// `MO2`.
pub fn lemma1_suite(cat: &Catalog) -> Result<SuiteReport> {
    let mut t = Tally::default();
    let mut rows = Vec::new();
    let config = StateConfig::default();
    for name in MORPHISM_FIXTURES {
        let m = cat.load_morphism(name)?;
        let sp = StatePolytope::new(&m.source.logic, &config)?;
        let tp = StatePolytope::new(&m.target.logic, &config)?;
        let (checks, failures) = lemma1_sweep(&sp, &tp, &m.morphism, None)?;
        absorb(&mut t, checks, failures);
        rows.push(json!({"morphism": name, "checks": checks}));
    }
    for name in ["boolean3", "MO2"] {
        let logic = cat.load_logic(name)?;
        let poly = StatePolytope::new(&logic, &config)?;
        for a in fixture_automorphisms(&logic)? {
            let (checks, failures) = lemma1_sweep(&poly, &poly, a.morphism(), Some(&a))?;
            absorb(&mut t, checks, failures);
            rows.push(
                json!({"automorphism_of": name, "map": map_json(a.morphism()), "checks": checks}),
            );
        }
    }
    Ok(t.finish("Lemma 1", json!(rows)))
}

fn absorb(t: &mut Tally, checks: u64, failures: Vec<String>) {
    t.checks += checks;
    t.failed += failures.len() as u64;
    for f in failures {
        if t.failures.len() < MAX_RECORDED_FAILURES {
            t.failures.push(f);
        }
    }
}

/// Composite with (I) and (J) verified, plus both state polytopes.
pub struct PreparedComposite {
    pub composite: CompositeLogic,
    pub factor: StatePolytope,
    pub ambient: StatePolytope,
}

pub fn prepare(mut c: CompositeLogic, budget: &mut Budget) -> Result<PreparedComposite> {
    if !c.check_condition_i(budget)? {
        return Err(Error::PreconditionFailed("condition (I) fails".into()).into());
    }
    if let Some(j) = c.check_condition_j() {
        return Err(Error::PreconditionFailed(format!(
            "condition (J) fails at ({}, {})",
            j.e.index(),
            j.f.index()
        ))
        .into());
    }
    let config = StateConfig::default();
    let factor = StatePolytope::new(c.factor(), &config)?;
    let ambient = StatePolytope::new(c.ambient(), &config)?;
    Ok(PreparedComposite {
        composite: c,
        factor,
        ambient,
    })
}

/// Lemma 2 over all `(e1, e2, f1, f2)` whose factor transition
/// probabilities exist.
pub fn lemma2_sweep(p: &PreparedComposite) -> Result<Sweep> {
    let mut t = Tally::default();
    let fl = p.composite.factor();
    let mut defined = Vec::new();
    for e1 in fl.elements() {
        for e2 in fl.elements() {
            match p.factor.transition_probability(e2, e1) {
                Ok(tp) if tp.exists() => defined.push((e1, e2)),
                Ok(_) | Err(Error::Undefined(_)) => {}
                Err(e) => return Err(e.into()),
            }
        }
    }
    for &(e1, e2) in &defined {
        for &(f1, f2) in &defined {
            match check_lemma2(&p.composite, &p.factor, &p.ambient, e1, e2, f1, f2) {
                Ok(r) => {
                    t.check(r.joint == &r.first * &r.second, || {
                        "report sides differ".into()
                    });
                }
                Err(err @ Error::LemmaViolated { .. }) => {
                    let l = |e: Element| fl.label(e).to_string();
                    t.fail(format!(
                        "({}, {}, {}, {}): {err}",
                        l(e1),
                        l(e2),
                        l(f1),
                        l(f2)
                    ));
                }
                Err(err) => return Err(err.into()),
            }
        }
    }
    Ok((t.checks, t.failures))
}

/// Lemma 3 over every ambient vertex and every atom pair.
pub fn lemma3_sweep(p: &PreparedComposite) -> Result<Sweep> {
    let mut t = Tally::default();
    let atoms = p.composite.factor().atoms();
    for rho in p.ambient.vertices() {
        for &e in atoms {
            for &f in atoms {
                match check_lemma3(&p.composite, &p.factor, &p.ambient, e, f, rho) {
                    Ok(_) => {
                        t.check(true, String::new);
                    }
                    Err(err @ Error::LemmaViolated { .. }) => t.fail(err.to_string()),
                    Err(err) => return Err(err.into()),
                }
            }
        }
    }
    Ok((t.checks, t.failures))
}

pub fn lemma2_suite(cat: &Catalog) -> Result<SuiteReport> {
    composite_suite(cat, "Lemma 2", lemma2_sweep)
}

pub fn lemma3_suite(cat: &Catalog) -> Result<SuiteReport> {
    composite_suite(cat, "Lemma 3", lemma3_sweep)
}

fn composite_suite(
    cat: &Catalog,
    title: &str,
    sweep: fn(&PreparedComposite) -> Result<Sweep>,
) -> Result<SuiteReport> {
    let mut t = Tally::default();
    let mut rows = Vec::new();
    for name in PRODUCT_FIXTURES {
        let p = prepare(cat.load_composite(name)?, &mut Budget::default())?;
        let (checks, failures) = sweep(&p)?;
        absorb(&mut t, checks, failures);
        rows.push(json!({"composite": name, "checks": checks}));
    }
    Ok(t.finish(title, json!(rows)))
}

/// Every nonempty `C` of factor atoms with every blank atom `f`.
pub fn all_clone_problems(ctx: &CloneContext) -> Result<Vec<CloneProblem>> {
    let atoms = ctx.composite().factor().atoms().to_vec();
    let mut out = Vec::new();
    for mask in 1u32..1 << atoms.len() {
        let c: Vec<Element> = (0..atoms.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| atoms[i])
            .collect();
        for &f in &atoms {
            out.push(CloneProblem::new(ctx, &c, f)?);
        }
    }
    Ok(out)
}

/// Result of the cloning sweep on one composite.
pub struct TheoremSweep {
    pub checks: u64,
    pub failures: Vec<String>,
    pub automorphisms: u64,
    pub rows: Vec<Value>,
}

/// Exhaustive cloning search for all problems on one composite: cloners
/// exist exactly for pairwise-orthogonal `C`, both cloning criteria agree,
/// and the classical cloner passes with a consistent certificate.
pub fn theorem1_sweep(c: CompositeLogic, budget: &mut Budget) -> Result<TheoremSweep> {
    let mut t = Tally::default();
    let ctx = CloneContext::new(c, &StateConfig::default(), budget)?;
    let problems = all_clone_problems(&ctx)?;
    let reports = clone_search_many(&ctx, &problems, budget)?;
    let fl = ctx.composite().factor();
    let mut rows = Vec::new();
    let mut automorphisms = 0;
    for r in &reports {
        let p = &r.problem;
        let label = format!("C = {}, f = {}", fl.render(p.atoms()), fl.label(p.blank()));
        automorphisms = r.automorphisms;
        t.check(r.cloner.is_some() == r.orthogonal, || {
            format!(
                "{label}: cloner found = {}, orthogonal = {}",
                r.cloner.is_some(),
                r.orthogonal
            )
        });
        t.check(r.theorem_consistent, || {
            format!("{label}: cloner for a non-orthogonal set")
        });
        t.check(r.divergences == 0, || {
            format!("{label}: {} divergences between criteria", r.divergences)
        });
        let zero_one = r.pairwise.iter().flatten().all(|x| {
            x.as_ref()
                .is_some_and(|v| *v == rational::zero() || *v == rational::one())
        });
        t.check(!r.orthogonal || zero_one, || {
            format!("{label}: orthogonal set with a transition outside {{0, 1}}")
        });
        let mut classical = Value::Null;
        if r.orthogonal {
            let cl = classical_cloner(&ctx, p)?;
            let v = is_cloning_transformation(&ctx, p, &cl)?;
            t.check(v.definition && v.grid, || {
                format!("{label}: classical cloner fails {v:?}")
            });
            match theorem1_certificate(&ctx, p, &cl) {
                Ok(cert) => {
                    for entry in &cert {
                        let s = &entry.s;
                        t.check(
                            entry.pullback == s * s
                                && entry.direct == *s
                                && entry.pullback == entry.direct,
                            || {
                                format!(
                                    "{label}: certificate entry ({}, {}) inconsistent",
                                    fl.label(entry.e1),
                                    fl.label(entry.e2)
                                )
                            },
                        );
                    }
                }
                Err(err @ Error::CertificateFailed { .. }) => t.fail(format!("{label}: {err}")),
                Err(err) => return Err(err.into()),
            }
            classical = map_json(cl.morphism());
        }
        rows.push(json!({
            "C": p.atoms().iter().map(|&e| fl.label(e)).collect::<Vec<_>>(),
            "f": fl.label(p.blank()),
            "orthogonal": r.orthogonal,
            "cloners": r.cloners,
            "first_cloner": r.cloner.as_ref().map_or(Value::Null, |a| map_json(a.morphism())),
            "classical_cloner": classical,
            "pairwise": r.pairwise.iter().map(|row| row.iter().map(|x| opt_pq(x.as_ref())).collect::<Vec<_>>()).collect::<Vec<_>>(),
        }));
    }
    Ok(TheoremSweep {
        checks: t.checks,
        failures: t.failures,
        automorphisms,
        rows,
    })
}

pub fn theorem1_suite(cat: &Catalog) -> Result<SuiteReport> {
    let mut t = Tally::default();
    let mut rows = Vec::new();
    for name in PRODUCT_FIXTURES {
        let mut budget = Budget::new(DEFAULT_AUTOMORPHISM_BUDGET);
        let s = theorem1_sweep(cat.load_composite(name)?, &mut budget)?;
        absorb(&mut t, s.checks, s.failures);
        rows.push(json!({
            "composite": name,
            "automorphisms": s.automorphisms,
            "problems": s.rows.len(),
            "non_orthogonal_problems": s.rows.iter().filter(|r| r["orthogonal"] == false).count(),
            "results": s.rows,
        }));
    }
    Ok(t.finish("Theorem 1 certificate", json!(rows)))
}

pub const HILBERT_INSTANCES: usize = 1000;

/// Randomized operator-level checks: trace formula on commuting triples,
/// rank-one transitions, the matrix product identity and the qubit
/// no-cloning witness.
pub fn hilbert_suite(seed: u64, instances: usize) -> Result<SuiteReport> {
    let mut t = Tally::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tol = DEFAULT_TOLERANCE;

    let mut max_a: f64 = 0.0;
    for _ in 0..instances {
        let d = rand::Rng::random_range(&mut rng, 2..=4);
        let (a, w) = sweep::diagonal_density(&mut rng, d);
        let em = sweep::mask(&mut rng, d, true);
        let fm = sweep::mask(&mut rng, d, false);
        let (e, f) = (
            hilbert::ProjectionOperator::diagonal(&em),
            hilbert::ProjectionOperator::diagonal(&fm),
        );
        let num: f64 = (0..d).filter(|&i| em[i] && fm[i]).map(|i| w[i]).sum();
        let den: f64 = (0..d).filter(|&i| em[i]).map(|i| w[i]).sum();
        let err = (hilbert::trace_cond_prob(&a, &e, &f, tol)? - num / den).abs();
        max_a = max_a.max(err);
        t.check(err <= EXACT_TOLERANCE, || {
            format!("commuting triple off by {err:e}")
        });
    }

    let mut max_b: f64 = 0.0;
    for _ in 0..instances {
        let d = rand::Rng::random_range(&mut rng, 2..=4);
        let xi = sweep::unit_vector(&mut rng, d);
        let f = sweep::projection(&mut rng, d);
        let e = hilbert::ProjectionOperator::rank_one(&xi);
        let direct = hilbert::atom_transition(&xi, &f)?;
        match hilbert::transition_exists(&e, &f, tol)? {
            Some(s) => {
                let err = (s - direct).abs();
                max_b = max_b.max(err);
                t.check(err <= tol, || format!("rank-one transition off by {err:e}"));
            }
            None => t.fail("rank-one conditioner without a transition".into()),
        }
    }

    for _ in 0..instances {
        let d = rand::Rng::random_range(&mut rng, 2..=4);
        let [e1, e2, f1, f2] = [(); 4].map(|_| sweep::rank_one(&mut rng, d));
        match hilbert::lemma2_matrix_check(&e1, &e2, &f1, &f2, tol) {
            Ok(_) => {
                t.check(true, String::new);
            }
            Err(err) => t.fail(format!("product identity: {err}")),
        }
    }

    let xi1 = PureVector::from_real(&[1.0, 0.0])?;
    let xi2 = PureVector::from_real(&[1.0, 1.0])?;
    let w = hilbert::no_cloning_witness(&xi1, &xi2, tol)?;
    t.check(
        (w.s - 0.5).abs() <= EXACT_TOLERANCE
            && (w.s_squared - 0.25).abs() <= EXACT_TOLERANCE
            && !w.cloneable,
        || format!("no-cloning witness reports {w:?}"),
    );

    let detail = json!({
        "seed": seed,
        "instances": instances,
        "commuting_max_error": max_a,
        "rank_one_max_error": max_b,
        "witness": {"s": w.s, "s_squared": w.s_squared, "cloneable": w.cloneable},
    });
    Ok(t.finish("Hilbert cross-checks", detail))
}
