use proptest::prelude::*;
use proptest::sample::{select, subsequence};
use qlogic::core::builders;
use qlogic::core::logic::{Element, FiniteLogic, LogicDescription};
use qlogic::core::rational::{ratio, Rational};
use qlogic::format::{self, LoadedLogic, LogicFile};

fn bases() -> Vec<LogicDescription> {
    vec![
        builders::boolean_n(1),
        builders::boolean_n(2),
        builders::boolean_n(3),
        builders::mo(1),
        builders::mo(2),
        builders::mo(3),
        builders::pasting(&[&["a", "b", "c"], &["c", "d", "e"]]),
    ]
}

/// Relabels positions by `perm` (new position of old index `i` is
/// `perm[i]`), adds implied pairs and reorders everything.
fn scramble(
    raw: &LogicDescription,
    perm: &[usize],
    extra: &[(usize, usize)],
    reverse: bool,
) -> LogicDescription {
    let n = raw.labels.len();
    let mut labels = vec![String::new(); n];
    let mut ortho = vec![0; n];
    for i in 0..n {
        labels[perm[i]] = raw.labels[i].clone();
        ortho[perm[i]] = perm[raw.ortho[i]];
    }
    let mut le: Vec<(usize, usize)> = raw
        .le_pairs
        .iter()
        .chain(extra)
        .map(|&(a, b)| (perm[a], perm[b]))
        .collect();
    if reverse {
        le.reverse();
    }
    LogicDescription {
        labels,
        le_pairs: le,
        ortho,
        zero: perm[raw.zero],
        one: perm[raw.one],
    }
}

fn through_json(raw: LogicDescription) -> LogicDescription {
    let text = format::to_json_string(&LogicFile::from(raw));
    serde_json::from_str::<LogicFile>(&text).unwrap().into()
}

fn scrambled() -> impl Strategy<Value = (LogicDescription, LogicDescription)> {
    select(bases()).prop_flat_map(|raw| {
        let n = raw.labels.len();
        let perm = Just((0..n).collect::<Vec<_>>()).prop_shuffle();
        // Implied pairs: reflexive ones and everything above zero / below one.
        let implied: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| [(i, i), (raw.zero, i), (i, raw.one)])
            .collect();
        let k = implied.len();
        (Just(raw), perm, subsequence(implied, 0..=k), any::<bool>())
            .prop_map(|(raw, perm, extra, rev)| (scramble(&raw, &perm, &extra, rev), raw))
    })
}

/// Same labels, same order and orthocomplement, compared by label.
fn same_up_to_labels(a: &FiniteLogic, b: &FiniteLogic) -> bool {
    let find = |l: &FiniteLogic, x: Element| l.element(a.label(x)).unwrap();
    a.len() == b.len()
        && a.elements().all(|x| {
            b.element(a.label(x)).is_some()
                && find(b, a.ortho(x)) == b.ortho(find(b, x))
                && a.elements()
                    .all(|y| a.leq(x, y) == b.leq(find(b, x), find(b, y)))
        })
}

/// Keeps the inner elements in their original relative order and moves
/// only the bounds.
fn bounds_moved(raw: &LogicDescription, zero_at: usize, one_at: usize) -> Vec<usize> {
    let n = raw.labels.len();
    let (zero_at, one_at) = (zero_at % n, one_at % n);
    let one_at = if one_at == zero_at {
        (one_at + 1) % n
    } else {
        one_at
    };
    let mut free = (0..n).filter(|&p| p != zero_at && p != one_at);
    (0..n)
        .map(|i| match i {
            _ if i == raw.zero => zero_at,
            _ if i == raw.one => one_at,
            _ => free.next().unwrap(),
        })
        .collect()
}

proptest! {
    #[test]
    fn scrambled_descriptions_load_to_an_isomorphic_logic((scrambled, raw) in scrambled()) {
        let canonical = LoadedLogic::from_description(&raw).unwrap();
        let loaded = LoadedLogic::from_description(&through_json(scrambled.clone())).unwrap();
        prop_assert!(same_up_to_labels(&loaded.logic, &canonical.logic));
        prop_assert_eq!(loaded.logic.label(loaded.logic.zero()), raw.labels[raw.zero].as_str());
        prop_assert_eq!(loaded.logic.label(loaded.logic.one()), raw.labels[raw.one].as_str());
        for (pos, label) in scrambled.labels.iter().enumerate() {
            prop_assert_eq!(loaded.logic.label(loaded.index[pos]), label.as_str());
        }
    }

    #[test]
    fn noncanonical_descriptions_load_identically(
        raw in select(bases()),
        zero_at in 0usize..64,
        one_at in 0usize..64,
        rev in any::<bool>(),
    ) {
        let n = raw.labels.len();
        let perm = bounds_moved(&raw, zero_at, one_at);
        let extra: Vec<(usize, usize)> = (0..n).map(|i| (i, i)).collect();
        let moved = scramble(&raw, &perm, &extra, rev);
        let canonical = LoadedLogic::from_description(&raw).unwrap();
        let loaded = LoadedLogic::from_description(&through_json(moved)).unwrap();
        prop_assert!(loaded.logic == canonical.logic);
    }

    #[test]
    fn written_logics_reload_identically((scrambled, _) in scrambled()) {
        let l = LoadedLogic::from_description(&scrambled).unwrap().logic;
        let text = format::to_json_string(&LogicFile::from(&l));
        let back: LogicFile = serde_json::from_str(&text).unwrap();
        let reloaded = LoadedLogic::from_description(&back.into()).unwrap();
        prop_assert!(reloaded.logic == l);
        prop_assert_eq!(format::to_json_string(&LogicFile::from(&reloaded.logic)), text);
    }

    #[test]
    fn rationals_round_trip(pairs in prop::collection::vec((-1000i64..1000, 1i64..1000), 0..20)) {
        let xs: Vec<Rational> = pairs.iter().map(|&(p, q)| ratio(p, q)).collect();
        let strings = format::rationals_to_strings(&xs);
        prop_assert_eq!(format::parse_rationals(&strings).unwrap(), xs);
    }

    #[test]
    fn complex_rows_round_trip(entries in prop::collection::vec([-1e3f64..1e3, -1e3f64..1e3], 9)) {
        let rows: Vec<Vec<[f64; 2]>> = entries.chunks(3).map(<[_]>::to_vec).collect();
        let m = format::matrix_from_rows(&rows).unwrap();
        prop_assert_eq!(format::matrix_to_rows(&m), rows);
    }
}

#[test]
fn unknown_keys_and_ragged_matrices_are_rejected() {
    let text = r#"{"labels":["0","1"],"le":[[0,1]],"ortho":[1,0],"zero":0,"one":1,"extra":true}"#;
    assert!(serde_json::from_str::<LogicFile>(text).is_err());
    assert!(format::matrix_from_rows(&[vec![[1.0, 0.0]], vec![]]).is_err());
    assert!(format::parse_rationals(&["1/0".to_string()]).is_err());
}
