//! The `qlogic` command line.
//!
//! Exit codes: 0 when the queried property holds, 1 when it fails (the
//! report carries a witness), 2 on input errors, 3 when a search or vertex
//! budget runs out. With `--format json` standard output is one JSON
//! document, also for errors.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qlogic_core::cloning::{clone_search, theorem1_certificate, CloneContext, CloneProblem};
use qlogic_core::compat::{is_compatible_subset, Budget};
use qlogic_core::composite::{boolean_product, check_lemma2, CompositeLogic};
use qlogic_core::hilbert::{
    self, unique_conditionals, CMatrix, CVector, DensityOperator, ProjectionOperator, PureVector,
    UnitaryOperator, C64, DEFAULT_TOLERANCE,
};
use qlogic_core::morphisms::{
    check_lemma1a, for_each_automorphism, Automorphism, DEFAULT_AUTOMORPHISM_BUDGET,
};
use qlogic_core::polytope::VertexMethod;
use qlogic_core::rational::to_pq;
use qlogic_core::state::{
    ConditionF, ConditionG, ConditionalKind, State, StateConfig, StatePolytope,
};
use qlogic_core::{Element, Error, FiniteLogic};
use serde_json::{json, Map, Value};

use crate::error::FormatError;
use crate::format::{self, LoadedLogic};
use crate::suites::{self, state_json};

#[derive(Parser, Debug)]
#[command(
    name = "qlogic",
    version,
    about = "Conditional probabilities, transition probabilities and cloning on finite quantum logics"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Human, global = true)]
    pub format: OutputFormat,
    /// Search-node and vertex budget.
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    /// Seed for random Hilbert sweeps.
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Human,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Condition {
    #[value(name = "F", alias = "f")]
    F,
    #[value(name = "G", alias = "g")]
    G,
    #[value(name = "H", alias = "h")]
    H,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Double description.
    Dd,
    /// Enumeration of bases.
    Basis,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the orthomodular poset axioms.
    Validate { logic: PathBuf },
    /// List the atoms.
    Atoms { logic: PathBuf },
    /// Decide whether a set of elements lies in a Boolean subalgebra.
    Compat {
        logic: PathBuf,
        /// Comma-separated element labels.
        labels: String,
    },
    /// Enumerate the vertices of the state polytope.
    States {
        logic: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Dd)]
        method: Method,
    },
    /// Check condition (F), (G) or (H).
    Check {
        condition: Condition,
        logic: PathBuf,
    },
    /// Conditional probability of a state given an element.
    Condprob {
        state: PathBuf,
        #[arg(long)]
        given: String,
    },
    /// State-independent transition probability from `given` to `event`.
    Transprob {
        logic: PathBuf,
        #[arg(long)]
        given: String,
        #[arg(long)]
        event: String,
    },
    /// Count (and optionally list) the automorphisms.
    Autos {
        logic: PathBuf,
        #[arg(long)]
        list: bool,
    },
    /// The product of a Boolean logic with itself.
    Product {
        logic: PathBuf,
        /// Write the composite file here instead of printing it.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check mutual compatibility of the two embedded copies.
    #[command(name = "check-I")]
    CheckI { composite: PathBuf },
    /// Check that meets of embedded atoms are atoms.
    #[command(name = "check-J")]
    CheckJ { composite: PathBuf },
    /// Transition probabilities are preserved by a morphism.
    Lemma1 {
        /// Morphism file. Omit when using --automorphisms-of.
        #[arg(required_unless_present = "automorphisms_of")]
        morphism: Option<PathBuf>,
        /// Sweep every automorphism of this logic instead.
        #[arg(long, conflicts_with = "morphism")]
        automorphisms_of: Option<PathBuf>,
        #[arg(long, requires = "e2")]
        e1: Option<String>,
        #[arg(long, requires = "e1")]
        e2: Option<String>,
    },
    /// Product identity for transition probabilities on a composite.
    Lemma2 {
        composite: PathBuf,
        #[arg(long, requires_all = ["e2", "f1", "f2"])]
        e1: Option<String>,
        #[arg(long)]
        e2: Option<String>,
        #[arg(long)]
        f1: Option<String>,
        #[arg(long)]
        f2: Option<String>,
    },
    /// Restriction equivalence for atomic states on a composite.
    Lemma3 { composite: PathBuf },
    /// Search all ambient automorphisms for cloning transformations.
    CloneSearch {
        #[arg(long)]
        composite: PathBuf,
        /// Comma-separated atom labels to clone.
        #[arg(long = "C")]
        c: String,
        /// Blank atom.
        #[arg(long)]
        f: String,
    },
    /// Exhaustive cloning certificate, for one problem or all of them.
    #[command(name = "certify-theorem1")]
    CertifyTheorem1 {
        #[arg(long)]
        composite: PathBuf,
        #[arg(long = "C", requires = "f")]
        c: Option<String>,
        #[arg(long, requires = "c")]
        f: Option<String>,
    },
    /// Projections and density operators on C^d.
    Hilbert(HilbertArgs),
}

#[derive(Args, Debug)]
pub struct HilbertArgs {
    /// Numeric tolerance.
    #[arg(long, default_value_t = DEFAULT_TOLERANCE, global = true)]
    pub tolerance: f64,
    #[command(subcommand)]
    pub command: HilbertCommand,
}

/// Operand syntax. Vectors: comma-separated complex numbers (`1,0.5-2i`),
/// normalized on input, or `file:<path>`. Projections: `diag:1,1,0`,
/// `span:<vec>;<vec>`, `id:<d>` or `file:<path>`. Density operators:
/// `mixed:<d>`, `pure:<vec>`, `diag:<weights>` or `file:<path>`. Unitaries:
/// `perm:<images>`, `id:<d>` or `file:<path>`.
#[derive(Subcommand, Debug)]
pub enum HilbertCommand {
    /// tr(a e f e) / tr(a e).
    Trace {
        #[arg(long)]
        a: String,
        #[arg(long)]
        e: String,
        #[arg(long)]
        f: String,
    },
    /// The s with e f e = s e, if any.
    Transition {
        #[arg(long)]
        e: String,
        #[arg(long)]
        f: String,
    },
    /// <xi|f xi>.
    Atom {
        #[arg(long)]
        xi: String,
        #[arg(long)]
        f: String,
    },
    /// Product identity for rank-one projections.
    Lemma2 {
        #[arg(long)]
        e1: String,
        #[arg(long)]
        e2: String,
        #[arg(long)]
        f1: String,
        #[arg(long)]
        f2: String,
    },
    /// Whether U maps xi (x) f to xi (x) xi for every xi in C.
    Cloner {
        #[arg(long)]
        unitary: String,
        /// Semicolon-separated vectors.
        #[arg(long = "C")]
        c: String,
        #[arg(long)]
        f: String,
    },
    /// Overlap test for cloning two pure states.
    NoCloning {
        #[arg(long)]
        xi1: String,
        #[arg(long)]
        xi2: String,
    },
    /// Seeded random cross-checks.
    Sweep {
        #[arg(long, default_value_t = suites::HILBERT_INSTANCES)]
        instances: usize,
    },
}

/// Exit status and captured streams of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub const EXIT_HOLDS: i32 = 0;
pub const EXIT_FAILS: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug)]
enum Failure {
    Input(String),
    Budget(String),
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        match e {
            FormatError::Logic(err) => err.into(),
            other => Failure::Input(other.to_string()),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::SearchBudgetExceeded(_) | Error::VertexBudgetExceeded(_) => {
                Failure::Budget(e.to_string())
            }
            other => Failure::Input(other.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// A finished report: whether the property holds, the JSON fields and the
/// human rendering.
struct Report {
    holds: bool,
    fields: Map<String, Value>,
    human: String,
}

impl Report {
    fn new(holds: bool) -> Self {
        Report {
            holds,
            fields: Map::new(),
            human: String::new(),
        }
    }

    fn field(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.fields.insert(key.into(), value.into());
        self
    }

    fn line(mut self, text: impl AsRef<str>) -> Self {
        self.human.push_str(text.as_ref());
        self.human.push('\n');
        self
    }
}

/// Runs one invocation; `args` includes the program name.
pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INPUT
            } else {
                EXIT_HOLDS
            };
            let text = e.render().to_string();
            return if e.use_stderr() {
                Output {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Output {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let command = command_name(&cli.command);
    let result = dispatch(&cli);
    let json = cli.format == OutputFormat::Json;
    match result {
        Ok(r) => {
            let status = if r.holds { "holds" } else { "fails" };
            let stdout = if json {
                let mut doc = Map::new();
                doc.insert("command".into(), command.into());
                doc.insert("status".into(), status.into());
                doc.extend(r.fields);
                format::to_json_string(&Value::Object(doc))
            } else {
                format!("{}status: {status}\n", r.human)
            };
            Output {
                code: if r.holds { EXIT_HOLDS } else { EXIT_FAILS },
                stdout,
                stderr: String::new(),
            }
        }
        Err(f) => {
            let (code, kind, message) = match f {
                Failure::Input(m) => (EXIT_INPUT, "input-error", m),
                Failure::Budget(m) => (EXIT_BUDGET, "budget-exceeded", m),
            };
            if json {
                let doc = json!({"command": command, "status": kind, "error": message});
                Output {
                    code,
                    stdout: format::to_json_string(&doc),
                    stderr: String::new(),
                }
            } else {
                Output {
                    code,
                    stdout: String::new(),
                    stderr: format!("error: {message}\n"),
                }
            }
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Validate { .. } => "validate",
        Command::Atoms { .. } => "atoms",
        Command::Compat { .. } => "compat",
        Command::States { .. } => "states",
        Command::Check { .. } => "check",
        Command::Condprob { .. } => "condprob",
        Command::Transprob { .. } => "transprob",
        Command::Autos { .. } => "autos",
        Command::Product { .. } => "product",
        Command::CheckI { .. } => "check-I",
        Command::CheckJ { .. } => "check-J",
        Command::Lemma1 { .. } => "lemma1",
        Command::Lemma2 { .. } => "lemma2",
        Command::Lemma3 { .. } => "lemma3",
        Command::CloneSearch { .. } => "clone-search",
        Command::CertifyTheorem1 { .. } => "certify-theorem1",
        Command::Hilbert(_) => "hilbert",
    }
}

struct Ctx {
    budget: Option<u64>,
    seed: u64,
}

impl Ctx {
    fn search_budget(&self, default: u64) -> Budget {
        Budget::new(self.budget.unwrap_or(default))
    }

    fn state_config(&self, method: VertexMethod) -> StateConfig {
        let mut c = StateConfig {
            method,
            ..StateConfig::default()
        };
        if let Some(b) = self.budget {
            c.vertex_budget = usize::try_from(b).unwrap_or(usize::MAX);
        }
        c
    }

    fn polytope(&self, logic: &FiniteLogic) -> CliResult<StatePolytope> {
        Ok(StatePolytope::new(
            logic,
            &self.state_config(VertexMethod::default()),
        )?)
    }
}

fn dispatch(cli: &Cli) -> CliResult<Report> {
    let ctx = Ctx {
        budget: cli.budget,
        seed: cli.seed,
    };
    match &cli.command {
        Command::Validate { logic } => validate(logic),
        Command::Atoms { logic } => atoms(logic),
        Command::Compat { logic, labels } => compat(&ctx, logic, labels),
        Command::States { logic, method } => states(&ctx, logic, *method),
        Command::Check { condition, logic } => check(&ctx, *condition, logic),
        Command::Condprob { state, given } => condprob(&ctx, state, given),
        Command::Transprob {
            logic,
            given,
            event,
        } => transprob(&ctx, logic, given, event),
        Command::Autos { logic, list } => autos(&ctx, logic, *list),
        Command::Product { logic, out } => product(logic, out.as_deref()),
        Command::CheckI { composite } => check_i(&ctx, composite),
        Command::CheckJ { composite } => check_j(composite),
        Command::Lemma1 {
            morphism,
            automorphisms_of,
            e1,
            e2,
        } => lemma1(
            &ctx,
            morphism.as_deref(),
            automorphisms_of.as_deref(),
            e1.as_deref().zip(e2.as_deref()),
        ),
        Command::Lemma2 {
            composite,
            e1,
            e2,
            f1,
            f2,
        } => {
            let single = match (e1, e2, f1, f2) {
                (Some(a), Some(b), Some(c), Some(d)) => Some([a.as_str(), b, c, d]),
                _ => None,
            };
            lemma2(&ctx, composite, single)
        }
        Command::Lemma3 { composite } => lemma3(&ctx, composite),
        Command::CloneSearch { composite, c, f } => clone_search_cmd(&ctx, composite, c, f),
        Command::CertifyTheorem1 { composite, c, f } => {
            certify(&ctx, composite, c.as_deref().zip(f.as_deref()))
        }
        Command::Hilbert(h) => hilbert_cmd(&ctx, h),
    }
}

/// Splits a comma-separated label list, keeping commas inside braces and
/// parentheses (`{x,y}`, `(e1,e2)`).
pub fn split_labels(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '{' | '(' | '[' => depth += 1,
            '}' | ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(cur.trim().to_string());
                cur.clear();
                continue;
            }
            _ => {}
        }
        cur.push(ch);
    }
    if !cur.trim().is_empty() || !out.is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

fn resolve(logic: &FiniteLogic, label: &str) -> CliResult<Element> {
    logic
        .element(label)
        .ok_or_else(|| Failure::Input(FormatError::UnknownLabel(label.into()).to_string()))
}

fn resolve_all(logic: &FiniteLogic, labels: &str) -> CliResult<Vec<Element>> {
    split_labels(labels)
        .iter()
        .map(|l| resolve(logic, l))
        .collect()
}

fn labels_of(logic: &FiniteLogic, es: &[Element]) -> Vec<String> {
    es.iter().map(|&e| logic.label(e).to_string()).collect()
}

fn load_logic(path: &Path) -> CliResult<FiniteLogic> {
    Ok(format::read_logic(path)?.logic)
}

fn state_line(logic: &FiniteLogic, s: &State) -> String {
    logic
        .elements()
        .map(|e| format!("{}={}", logic.label(e), to_pq(s.value(e))))
        .collect::<Vec<_>>()
        .join(" ")
}

fn validate(path: &Path) -> CliResult<Report> {
    let raw = format::read_logic_description(path)?;
    match LoadedLogic::from_description(&raw) {
        Ok(l) => {
            let atoms = labels_of(&l.logic, l.logic.atoms());
            Ok(Report::new(true)
                .field("elements", l.logic.len())
                .field("atoms", atoms.clone())
                .line(format!(
                    "valid orthomodular poset with {} elements",
                    l.logic.len()
                ))
                .line(format!("atoms: {}", atoms.join(" "))))
        }
        Err(FormatError::Logic(err)) => {
            let (axiom, witness): (String, Vec<usize>) = match &err {
                Error::AxiomViolation { axiom, e, f } => (axiom.to_string(), vec![*e, *f]),
                Error::NotAPartialOrder { a, b } => ("order".into(), vec![*a, *b]),
                Error::OrthoNotInvolutive(e) => ("B".into(), vec![*e]),
                Error::NoBounds => ("bounds".into(), vec![]),
                _ => return Err(err.into()),
            };
            let labels: Vec<String> = witness.iter().map(|&i| raw.labels[i].clone()).collect();
            Ok(Report::new(false)
                .field("axiom", axiom.clone())
                .field("witness", labels.clone())
                .field("message", err.to_string())
                .line(format!("invalid: axiom ({axiom}) fails"))
                .line(format!("witness: {}", labels.join(", "))))
        }
        Err(other) => Err(other.into()),
    }
}

fn atoms(path: &Path) -> CliResult<Report> {
    let l = load_logic(path)?;
    let atoms = labels_of(&l, l.atoms());
    Ok(Report::new(true)
        .field("atoms", atoms.clone())
        .line(format!("{} atoms: {}", atoms.len(), atoms.join(" "))))
}

fn compat(ctx: &Ctx, path: &Path, labels: &str) -> CliResult<Report> {
    let l = load_logic(path)?;
    let members = resolve_all(&l, labels)?;
    let mut budget = ctx.search_budget(qlogic_core::compat::DEFAULT_NODE_BUDGET);
    let v = is_compatible_subset(&l, &members, &mut budget)?;
    if v.compatible {
        let w = labels_of(&l, v.witness.as_deref().unwrap_or_default());
        return Ok(Report::new(true)
            .field("members", labels_of(&l, &members))
            .field("subalgebra", w.clone())
            .line("compatible")
            .line(format!("Boolean subalgebra: {}", w.join(" "))));
    }
    let mut pair = Value::Null;
    let mut line = String::new();
    'outer: for (i, &a) in members.iter().enumerate() {
        for &b in &members[i + 1..] {
            if !is_compatible_subset(&l, &[a, b], &mut budget)?.compatible {
                pair = json!([l.label(a), l.label(b)]);
                line = format!("incompatible pair: {}, {}", l.label(a), l.label(b));
                break 'outer;
            }
        }
    }
    let mut r = Report::new(false)
        .field("members", labels_of(&l, &members))
        .field("incompatible_pair", pair)
        .line("not compatible");
    if !line.is_empty() {
        r = r.line(line);
    }
    Ok(r)
}

fn states(ctx: &Ctx, path: &Path, method: Method) -> CliResult<Report> {
    let l = load_logic(path)?;
    let m = match method {
        Method::Dd => VertexMethod::DoubleDescription,
        Method::Basis => VertexMethod::BasisEnumeration,
    };
    let p = StatePolytope::new(&l, &ctx.state_config(m))?;
    let mut r = Report::new(true)
        .field("labels", l.labels().to_vec())
        .field("dimension", p.dimension())
        .field(
            "vertices",
            p.vertices().iter().map(state_json).collect::<Vec<_>>(),
        )
        .line(format!(
            "dimension {}, {} vertices",
            p.dimension(),
            p.vertices().len()
        ));
    for (i, v) in p.vertices().iter().enumerate() {
        r = r.line(format!("{i}: {}", state_line(&l, v)));
    }
    Ok(r)
}

fn check(ctx: &Ctx, condition: Condition, path: &Path) -> CliResult<Report> {
    let l = load_logic(path)?;
    let p = ctx.polytope(&l)?;
    Ok(match condition {
        Condition::F => match p.check_condition_f() {
            ConditionF::Holds { witness } => Report::new(true)
                .field("condition", "F")
                .field("witness", state_json(&witness))
                .line("(F) holds")
                .line(format!("faithful state: {}", state_line(&l, &witness))),
            ConditionF::Fails { element } => Report::new(false)
                .field("condition", "F")
                .field("element", l.label(element))
                .line("(F) fails")
                .line(format!("every state vanishes on {}", l.label(element))),
        },
        Condition::G => {
            let (row, holds, _) = suites::condition_g_row(&path.display().to_string(), &l, &p);
            let mut r = Report::new(holds).field("condition", "G").line(if holds {
                "(G) holds"
            } else {
                "(G) fails"
            });
            match p.check_condition_g() {
                ConditionG::Holds => {}
                ConditionG::NonUnique {
                    given,
                    first,
                    second,
                } => {
                    r = r
                        .line(format!(
                            "two conditional states given e = {}",
                            l.label(given)
                        ))
                        .line(format!("first:  {}", state_line(&l, &first)))
                        .line(format!("second: {}", state_line(&l, &second)));
                }
                ConditionG::NonExistent { given, vertex } => {
                    r = r
                        .line(format!("no conditional state given e = {}", l.label(given)))
                        .line(format!("for: {}", state_line(&l, &vertex)));
                }
            }
            for key in ["reason", "given", "first", "second", "vertex"] {
                if let Some(v) = row.get(key) {
                    r = r.field(key, v.clone());
                }
            }
            r
        }
        Condition::H => {
            let h = p.check_condition_h();
            let empty = labels_of(&l, &h.empty_faces);
            let mut r = Report::new(h.holds())
                .field("condition", "H")
                .field("empty_faces", empty);
            match h.violation {
                None => r = r.line("(H) holds"),
                Some(v) => {
                    r = r
                        .field("e", l.label(v.e))
                        .field("f", l.label(v.f))
                        .field("empty_face", v.empty_face)
                        .line("(H) fails")
                        .line(format!(
                            "every state with value 1 on {} has value 1 on {}, yet {} is not below {}",
                            l.label(v.f),
                            l.label(v.e),
                            l.label(v.f),
                            l.label(v.e)
                        ));
                    if v.empty_face {
                        r = r.line(format!("(no state has value 1 on {})", l.label(v.f)));
                    }
                }
            }
            r
        }
    })
}

fn condprob(ctx: &Ctx, path: &Path, given: &str) -> CliResult<Report> {
    let (loaded, rho) = format::read_state(path)?;
    let l = &loaded.logic;
    let e = resolve(l, given)?;
    let p = ctx.polytope(l)?;
    let res = p.conditional_probability(&rho, e)?;
    let discrepancies: Vec<Value> = res
        .discrepancies
        .iter()
        .map(|d| json!({"event": l.label(d.event), "expected": to_pq(&d.expected), "found": to_pq(&d.found)}))
        .collect();
    let mut r = match &res.kind {
        ConditionalKind::Unique(mu) => Report::new(true)
            .field("kind", "unique")
            .field("conditional", state_json(mu))
            .line(format!("unique conditional state given {}", l.label(e)))
            .line(state_line(l, mu)),
        ConditionalKind::NonUnique(a, b) => Report::new(false)
            .field("kind", "non-unique")
            .field("first", state_json(a))
            .field("second", state_json(b))
            .line(format!(
                "conditional state given {} is not unique",
                l.label(e)
            ))
            .line(format!("first:  {}", state_line(l, a)))
            .line(format!("second: {}", state_line(l, b))),
        ConditionalKind::NonExistent => Report::new(false)
            .field("kind", "non-existent")
            .line(format!("no conditional state given {}", l.label(e))),
    };
    r = r
        .field("labels", l.labels().to_vec())
        .field("given", l.label(e))
        .field("discrepancies", discrepancies.clone());
    for d in &res.discrepancies {
        r = r.line(format!(
            "discrepancy at {}: expected {}, found {}",
            l.label(d.event),
            to_pq(&d.expected),
            to_pq(&d.found)
        ));
    }
    Ok(r)
}

fn transprob(ctx: &Ctx, path: &Path, given: &str, event: &str) -> CliResult<Report> {
    let l = load_logic(path)?;
    let (e, f) = (resolve(&l, given)?, resolve(&l, event)?);
    let p = ctx.polytope(&l)?;
    match p.transition_probability(f, e) {
        Ok(t) => {
            let r = Report::new(t.exists())
                .field("given", l.label(e))
                .field("event", l.label(f))
                .field("min", to_pq(&t.min))
                .field("max", to_pq(&t.max));
            Ok(match t.s() {
                Some(s) => r.field("value", to_pq(s)).line(format!(
                    "P({} | {}) = {}",
                    l.label(f),
                    l.label(e),
                    to_pq(s)
                )),
                None => r.field("value", Value::Null).line(format!(
                    "P({} | {}) does not exist: values range over [{}, {}]",
                    l.label(f),
                    l.label(e),
                    to_pq(&t.min),
                    to_pq(&t.max)
                )),
            })
        }
        Err(Error::Undefined(_)) => Ok(Report::new(false)
            .field("given", l.label(e))
            .field("event", l.label(f))
            .field("value", Value::Null)
            .field("reason", "no state has value 1 on the conditioning element")
            .line(format!(
                "P({} | {}) is undefined: no state has value 1 on {}",
                l.label(f),
                l.label(e),
                l.label(e)
            ))),
        Err(err) => Err(err.into()),
    }
}

fn map_json(a: &Automorphism) -> Value {
    json!(a
        .morphism()
        .map()
        .iter()
        .map(|e| e.index())
        .collect::<Vec<_>>())
}

fn map_human(l: &FiniteLogic, a: &Automorphism) -> String {
    l.atoms()
        .iter()
        .map(|&x| format!("{}->{}", l.label(x), l.label(a.apply(x))))
        .collect::<Vec<_>>()
        .join(" ")
}

fn autos(ctx: &Ctx, path: &Path, list: bool) -> CliResult<Report> {
    let l = load_logic(path)?;
    let mut budget = ctx.search_budget(DEFAULT_AUTOMORPHISM_BUDGET);
    let mut maps = Vec::new();
    let mut lines = Vec::new();
    let n = for_each_automorphism(&l, &mut budget, |a| {
        if list {
            maps.push(map_json(a));
            lines.push(map_human(&l, a));
        }
        std::ops::ControlFlow::Continue(())
    })?;
    let mut r = Report::new(true)
        .field("count", n)
        .line(format!("{n} automorphisms"));
    if list {
        r = r.field("maps", maps);
        for s in lines {
            r = r.line(s);
        }
    }
    Ok(r)
}

fn product(path: &Path, out: Option<&Path>) -> CliResult<Report> {
    let l = load_logic(path)?;
    let c = boolean_product(&l)?;
    let file = format::composite_file(&c);
    let mut r = Report::new(true)
        .field("ambient_elements", c.ambient().len())
        .field("ambient_atoms", labels_of(c.ambient(), c.ambient().atoms()))
        .field("condition_i", true)
        .field("condition_j", true)
        .line(format!(
            "product with {} elements, (I) and (J) hold",
            c.ambient().len()
        ));
    match out {
        Some(p) => {
            format::write_json(p, &file)?;
            r = r
                .field("written", p.display().to_string())
                .line(format!("written to {}", p.display()));
        }
        None => {
            r = r
                .field(
                    "composite",
                    serde_json::to_value(&file).expect("serializable"),
                )
                .line(format::to_json_string(&file).trim_end());
        }
    }
    Ok(r)
}

fn load_composite(path: &Path) -> CliResult<CompositeLogic> {
    Ok(format::read_composite(path)?)
}

fn check_i(ctx: &Ctx, path: &Path) -> CliResult<Report> {
    let mut c = load_composite(path)?;
    let holds =
        c.check_condition_i(&mut ctx.search_budget(qlogic_core::compat::DEFAULT_NODE_BUDGET))?;
    Ok(Report::new(holds).field("condition", "I").line(if holds {
        "(I) holds: the two embedded copies are mutually compatible"
    } else {
        "(I) fails"
    }))
}

fn check_j(path: &Path) -> CliResult<Report> {
    let mut c = load_composite(path)?;
    Ok(match c.check_condition_j() {
        None => Report::new(true).field("condition", "J").line("(J) holds"),
        Some(j) => {
            let fl = c.factor();
            let meet = j
                .meet
                .map_or(Value::Null, |m| Value::String(c.ambient().label(m).into()));
            Report::new(false)
                .field("condition", "J")
                .field("e", fl.label(j.e))
                .field("f", fl.label(j.f))
                .field("meet", meet.clone())
                .line("(J) fails")
                .line(format!(
                    "meet of the embedded atoms {} and {}: {}",
                    fl.label(j.e),
                    fl.label(j.f),
                    meet
                ))
        }
    })
}

fn sweep_report(checks: u64, failures: Vec<String>, title: &str) -> Report {
    let mut r = Report::new(failures.is_empty())
        .field("checks", checks)
        .field("failures", failures.clone())
        .line(format!(
            "{title}: {checks} checks, {} failures",
            failures.len()
        ));
    for f in failures {
        r = r.line(format!("  {f}"));
    }
    r
}

fn lemma1(
    ctx: &Ctx,
    morphism: Option<&Path>,
    autos_of: Option<&Path>,
    single: Option<(&str, &str)>,
) -> CliResult<Report> {
    if let Some(path) = autos_of {
        let l = load_logic(path)?;
        let p = ctx.polytope(&l)?;
        let autos = qlogic_core::morphisms::automorphisms(
            &l,
            &mut ctx.search_budget(DEFAULT_AUTOMORPHISM_BUDGET),
        )?;
        let (mut checks, mut failures) = (0, Vec::new());
        for a in &autos {
            let (c, f) = suites::lemma1_sweep(&p, &p, a.morphism(), Some(a))?;
            checks += c;
            failures.extend(f);
        }
        return Ok(sweep_report(
            checks,
            failures,
            &format!("Lemma 1 over {} automorphisms", autos.len()),
        )
        .field("automorphisms", autos.len()));
    }
    let m = format::read_morphism(morphism.expect("clap requires one input"))?;
    let sp = ctx.polytope(&m.source.logic)?;
    let tp = ctx.polytope(&m.target.logic)?;
    if let Some((a, b)) = single {
        let (e1, e2) = (resolve(sp.logic(), a)?, resolve(sp.logic(), b)?);
        return match check_lemma1a(&sp, &tp, &m.morphism, e1, e2) {
            Ok(r) => Ok(Report::new(true)
                .field("source", to_pq(&r.source))
                .field("target", to_pq(&r.target))
                .line(format!(
                    "P({b} | {a}) = {} = P(T{b} | T{a})",
                    to_pq(&r.source)
                ))),
            Err(Error::LemmaViolated { detail, .. }) => Ok(Report::new(false)
                .field("expected", detail.expected.as_ref().map(to_pq))
                .field("found", detail.found.as_ref().map(to_pq))
                .line(format!("violated: {detail}"))),
            Err(e) => Err(e.into()),
        };
    }
    let aut = (m.source.logic == m.target.logic)
        .then(|| {
            Automorphism::new(
                &m.source.logic,
                &m.morphism
                    .map()
                    .iter()
                    .map(|e| e.index())
                    .collect::<Vec<_>>(),
            )
            .ok()
        })
        .flatten();
    let (checks, failures) = suites::lemma1_sweep(&sp, &tp, &m.morphism, aut.as_ref())?;
    Ok(sweep_report(checks, failures, "Lemma 1"))
}

fn lemma2(ctx: &Ctx, path: &Path, single: Option<[&str; 4]>) -> CliResult<Report> {
    let p = suites::prepare(
        load_composite(path)?,
        &mut ctx.search_budget(qlogic_core::compat::DEFAULT_NODE_BUDGET),
    )?;
    let Some(labels) = single else {
        let (checks, failures) = suites::lemma2_sweep(&p)?;
        return Ok(sweep_report(checks, failures, "Lemma 2"));
    };
    let fl = p.composite.factor();
    let [e1, e2, f1, f2] = [0, 1, 2, 3].map(|i| resolve(fl, labels[i]));
    match check_lemma2(&p.composite, &p.factor, &p.ambient, e1?, e2?, f1?, f2?) {
        Ok(r) => Ok(Report::new(true)
            .field("first", to_pq(&r.first))
            .field("second", to_pq(&r.second))
            .field("joint", to_pq(&r.joint))
            .line(format!(
                "{} = {} * {}",
                to_pq(&r.joint),
                to_pq(&r.first),
                to_pq(&r.second)
            ))),
        Err(Error::LemmaViolated { detail, .. }) => Ok(Report::new(false)
            .field("expected", detail.expected.as_ref().map(to_pq))
            .field("found", detail.found.as_ref().map(to_pq))
            .line(format!("violated: {detail}"))),
        Err(e) => Err(e.into()),
    }
}

fn lemma3(ctx: &Ctx, path: &Path) -> CliResult<Report> {
    let p = suites::prepare(
        load_composite(path)?,
        &mut ctx.search_budget(qlogic_core::compat::DEFAULT_NODE_BUDGET),
    )?;
    let (checks, failures) = suites::lemma3_sweep(&p)?;
    Ok(sweep_report(checks, failures, "Lemma 3"))
}

fn clone_context(ctx: &Ctx, path: &Path, budget: &mut Budget) -> CliResult<CloneContext> {
    Ok(CloneContext::new(
        load_composite(path)?,
        &ctx.state_config(VertexMethod::default()),
        budget,
    )?)
}

fn pairwise_json(table: &[Vec<Option<qlogic_core::Rational>>]) -> Value {
    json!(table
        .iter()
        .map(|row| row
            .iter()
            .map(|x| x.as_ref().map(to_pq))
            .collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

fn clone_search_cmd(ctx: &Ctx, path: &Path, c: &str, f: &str) -> CliResult<Report> {
    let mut budget = ctx.search_budget(DEFAULT_AUTOMORPHISM_BUDGET);
    let cc = clone_context(ctx, path, &mut budget)?;
    let fl = cc.composite().factor();
    let atoms = resolve_all(fl, c)?;
    let problem = CloneProblem::new(&cc, &atoms, resolve(fl, f)?)?;
    let r = clone_search(&cc, &problem, &mut budget)?;
    let c_labels = labels_of(fl, problem.atoms());
    let mut rep = Report::new(r.cloner.is_some() && r.theorem_consistent)
        .field("C", c_labels.clone())
        .field("f", fl.label(problem.blank()))
        .field("automorphisms", r.automorphisms)
        .field("cloners", r.cloners)
        .field("divergences", r.divergences)
        .field("orthogonal", r.orthogonal)
        .field("theorem_consistent", r.theorem_consistent)
        .field("pairwise", pairwise_json(&r.pairwise))
        .field("cloner", r.cloner.as_ref().map_or(Value::Null, map_json))
        .line(format!(
            "C = {{{}}}, f = {}",
            c_labels.join(", "),
            fl.label(problem.blank())
        ))
        .line(format!(
            "{} of {} automorphisms are cloners",
            r.cloners, r.automorphisms
        ));
    if let Some(a) = &r.cloner {
        rep = rep.line(format!(
            "cloner: {}",
            map_human(cc.composite().ambient(), a)
        ));
    }
    rep = rep.line("pairwise P(e2 | e1):");
    for (i, row) in r.pairwise.iter().enumerate() {
        let cells: Vec<String> = row
            .iter()
            .map(|x| x.as_ref().map_or("-".into(), to_pq))
            .collect();
        rep = rep.line(format!("  {:>8} | {}", c_labels[i], cells.join(" ")));
    }
    Ok(rep)
}

fn certify(ctx: &Ctx, path: &Path, single: Option<(&str, &str)>) -> CliResult<Report> {
    let mut budget = ctx.search_budget(DEFAULT_AUTOMORPHISM_BUDGET);
    let Some((c, f)) = single else {
        let s = suites::theorem1_sweep(load_composite(path)?, &mut budget)?;
        return Ok(sweep_report(
            s.checks,
            s.failures,
            &format!("cloning certificate over {} automorphisms", s.automorphisms),
        )
        .field("automorphisms", s.automorphisms)
        .field("results", s.rows));
    };
    let cc = clone_context(ctx, path, &mut budget)?;
    let fl = cc.composite().factor();
    let atoms = resolve_all(fl, c)?;
    let problem = CloneProblem::new(&cc, &atoms, resolve(fl, f)?)?;
    let r = clone_search(&cc, &problem, &mut budget)?;
    let Some(t) = &r.cloner else {
        return Ok(Report::new(r.theorem_consistent)
            .field("cloner", Value::Null)
            .field("orthogonal", r.orthogonal)
            .line(format!("no cloner among {} automorphisms", r.automorphisms)));
    };
    match theorem1_certificate(&cc, &problem, t) {
        Ok(entries) => {
            let mut rep = Report::new(r.theorem_consistent)
                .field("cloner", map_json(t))
                .field(
                    "entries",
                    entries
                        .iter()
                        .map(|e| json!({"e1": fl.label(e.e1), "e2": fl.label(e.e2), "s": to_pq(&e.s), "pullback": to_pq(&e.pullback), "direct": to_pq(&e.direct)}))
                        .collect::<Vec<_>>(),
                )
                .line(format!("cloner: {}", map_human(cc.composite().ambient(), t)));
            for e in &entries {
                rep = rep.line(format!(
                    "  P({} | {}) = {}: pulled back {}, direct {}",
                    fl.label(e.e2),
                    fl.label(e.e1),
                    to_pq(&e.s),
                    to_pq(&e.pullback),
                    to_pq(&e.direct)
                ));
            }
            Ok(rep)
        }
        Err(e @ Error::CertificateFailed { .. }) => Ok(Report::new(false)
            .field("error", e.to_string())
            .line(e.to_string())),
        Err(e) => Err(e.into()),
    }
}

// Hilbert operands.

fn parse_complex(s: &str) -> CliResult<C64> {
    C64::from_str(s.trim()).map_err(|_| Failure::Input(format!("not a complex number: {s:?}")))
}

fn parse_components(s: &str) -> CliResult<CVector> {
    let xs: Vec<C64> = s.split(',').map(parse_complex).collect::<CliResult<_>>()?;
    Ok(CVector::from_vec(xs))
}

fn read_file_vector(path: &str) -> CliResult<CVector> {
    let pairs: format::ComplexPairs = format::read_json(Path::new(path))?;
    Ok(format::vector_from_pairs(&pairs))
}

fn parse_vector(s: &str) -> CliResult<PureVector> {
    let v = match s.strip_prefix("file:") {
        Some(p) => read_file_vector(p)?,
        None => parse_components(s)?,
    };
    Ok(PureVector::normalized(v)?)
}

fn read_file_matrix(path: &str) -> CliResult<CMatrix> {
    Ok(format::read_matrix(Path::new(path))?)
}

fn parse_dim(s: &str) -> CliResult<usize> {
    match s.trim().parse::<usize>() {
        Ok(d) if d > 0 => Ok(d),
        _ => Err(Failure::Input(format!("not a dimension: {s:?}"))),
    }
}

fn parse_projection(s: &str, tol: f64) -> CliResult<ProjectionOperator> {
    let (kind, rest) = s
        .split_once(':')
        .ok_or_else(|| Failure::Input(format!("projection needs a kind prefix: {s:?}")))?;
    Ok(match kind {
        "diag" => {
            let mask = rest
                .split(',')
                .map(|x| match x.trim() {
                    "0" => Ok(false),
                    "1" => Ok(true),
                    other => Err(Failure::Input(format!(
                        "diagonal entries must be 0 or 1, got {other:?}"
                    ))),
                })
                .collect::<CliResult<Vec<_>>>()?;
            ProjectionOperator::diagonal(&mask)
        }
        "span" => {
            let vs: Vec<CVector> = rest
                .split(';')
                .map(parse_components)
                .collect::<CliResult<_>>()?;
            let d = vs[0].len();
            ProjectionOperator::onto_span(d, &vs, tol)?
        }
        "id" => ProjectionOperator::identity(parse_dim(rest)?),
        "file" => ProjectionOperator::new(read_file_matrix(rest)?, tol)?,
        _ => return Err(Failure::Input(format!("unknown projection kind {kind:?}"))),
    })
}

fn parse_density(s: &str, tol: f64) -> CliResult<DensityOperator> {
    let (kind, rest) = s
        .split_once(':')
        .ok_or_else(|| Failure::Input(format!("density operator needs a kind prefix: {s:?}")))?;
    Ok(match kind {
        "mixed" => DensityOperator::maximally_mixed(parse_dim(rest)?),
        "pure" => DensityOperator::pure(&parse_vector(rest)?),
        "diag" => {
            let w = parse_components(rest)?;
            DensityOperator::new(CMatrix::from_diagonal(&w), tol)?
        }
        "file" => DensityOperator::new(read_file_matrix(rest)?, tol)?,
        _ => return Err(Failure::Input(format!("unknown density kind {kind:?}"))),
    })
}

fn parse_unitary(s: &str, tol: f64) -> CliResult<UnitaryOperator> {
    let (kind, rest) = s
        .split_once(':')
        .ok_or_else(|| Failure::Input(format!("unitary needs a kind prefix: {s:?}")))?;
    Ok(match kind {
        "perm" => {
            let images = rest
                .split(',')
                .map(|x| {
                    x.trim()
                        .parse::<usize>()
                        .map_err(|_| Failure::Input(format!("not an index: {x:?}")))
                })
                .collect::<CliResult<Vec<_>>>()?;
            UnitaryOperator::permutation(&images)?
        }
        "id" => UnitaryOperator::identity(parse_dim(rest)?),
        "file" => UnitaryOperator::new(read_file_matrix(rest)?, tol)?,
        _ => return Err(Failure::Input(format!("unknown unitary kind {kind:?}"))),
    })
}

fn qubit_note(r: Report, dim: usize) -> Report {
    if unique_conditionals(dim) {
        r
    } else {
        r.field("unique_conditionals", false)
            .line("note: conditional probabilities on C^2 are not unique")
    }
}

fn hilbert_cmd(ctx: &Ctx, h: &HilbertArgs) -> CliResult<Report> {
    let tol = h.tolerance;
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(Failure::Input(format!("invalid tolerance {tol}")));
    }
    Ok(match &h.command {
        HilbertCommand::Trace { a, e, f } => {
            let a = parse_density(a, tol)?;
            let (e, f) = (parse_projection(e, tol)?, parse_projection(f, tol)?);
            let raw = hilbert::trace_cond_prob(&a, &e, &f, tol).map_err(|err| match err {
                Error::ZeroProbability => Failure::Input(err.to_string()),
                other => other.into(),
            })?;
            let value = raw.clamp(0.0, 1.0);
            qubit_note(
                Report::new(true)
                    .field("value", value)
                    .field("raw", raw)
                    .line(format!("tr(aefe)/tr(ae) = {value}")),
                a.dim(),
            )
        }
        HilbertCommand::Transition { e, f } => {
            let (e, f) = (parse_projection(e, tol)?, parse_projection(f, tol)?);
            let s = hilbert::transition_exists(&e, &f, tol)?;
            let r = Report::new(s.is_some()).field("value", s);
            qubit_note(
                match s {
                    Some(s) => r.line(format!("efe = s e with s = {s}")),
                    None => r.line("efe is not a multiple of e"),
                },
                e.dim(),
            )
        }
        HilbertCommand::Atom { xi, f } => {
            let xi = parse_vector(xi)?;
            let f = parse_projection(f, tol)?;
            let v = hilbert::atom_transition(&xi, &f)?;
            qubit_note(
                Report::new(true)
                    .field("value", v)
                    .line(format!("<xi|f xi> = {v}")),
                xi.dim(),
            )
        }
        HilbertCommand::Lemma2 { e1, e2, f1, f2 } => {
            let [e1, e2, f1, f2] = [e1, e2, f1, f2].map(|s| parse_projection(s, tol));
            let (e1, e2, f1, f2) = (e1?, e2?, f1?, f2?);
            match hilbert::lemma2_matrix_check(&e1, &e2, &f1, &f2, tol) {
                Ok(r) => Report::new(true)
                    .field("first", r.first)
                    .field("second", r.second)
                    .field("joint", r.joint)
                    .line(format!("{} = {} * {}", r.joint, r.first, r.second)),
                Err(Error::CheckFailed(m)) => {
                    Report::new(false).field("message", m.clone()).line(m)
                }
                Err(e) => return Err(e.into()),
            }
        }
        HilbertCommand::Cloner { unitary, c, f } => {
            let u = parse_unitary(unitary, tol)?;
            let cs: Vec<PureVector> = c.split(';').map(parse_vector).collect::<CliResult<_>>()?;
            let f = parse_vector(f)?;
            let ok = hilbert::test_unitary_cloner(&u, &cs, &f, tol)?;
            let mut overlaps = Vec::new();
            for (i, a) in cs.iter().enumerate() {
                for b in &cs[i + 1..] {
                    overlaps.push(a.overlap(b));
                }
            }
            Report::new(ok)
                .field("cloner", ok)
                .field("overlaps", overlaps)
                .line(if ok {
                    "U clones every vector of C"
                } else {
                    "U does not clone C"
                })
        }
        HilbertCommand::NoCloning { xi1, xi2 } => {
            let (a, b) = (parse_vector(xi1)?, parse_vector(xi2)?);
            let w = hilbert::no_cloning_witness(&a, &b, tol)?;
            let r = Report::new(w.cloneable)
                .field("s", w.s)
                .field("s_squared", w.s_squared)
                .field("cloneable", w.cloneable);
            qubit_note(
                if w.cloneable {
                    r.line(format!("s = {} is 0 or 1: cloneable", w.s))
                } else {
                    r.line(format!(
                        "s = {} but s^2 = {}: not cloneable",
                        w.s, w.s_squared
                    ))
                },
                a.dim(),
            )
        }
        HilbertCommand::Sweep { instances } => {
            let s = suites::hilbert_suite(ctx.seed, *instances)?;
            let mut r = Report::new(s.passed)
                .field("checks", s.checks)
                .field("failures", s.failures.clone())
                .field("detail", s.detail.clone())
                .line(format!(
                    "{} checks, {} failures (seed {})",
                    s.checks,
                    s.failures.len(),
                    ctx.seed
                ));
            for f in s.failures {
                r = r.line(format!("  {f}"));
            }
            r
        }
    })
}
