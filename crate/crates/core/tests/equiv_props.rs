use permup::labels::Level;
use permup::nicheck::{label_universe, project_value, value_equiv, Adversary, EquivDef};
use permup::{Label, LabelFamily, LabeledValue, LatticeSpec, ProdLabel, Strategy};
use proptest::prelude::*;

fn lattice_values(lat: &LatticeSpec) -> Vec<LabeledValue> {
    label_universe(Strategy::Pua, lat, LabelFamily::Lattice)
        .into_iter()
        .flat_map(|k| [0, 1].map(|n| LabeledValue::new(n, k)))
        .collect()
}

fn product_values(arity: usize) -> Vec<LabeledValue> {
    let levels = [Level::L, Level::H, Level::P];
    let mut labels = vec![Vec::new()];
    for _ in 0..arity {
        labels = labels
            .into_iter()
            .flat_map(|prefix: Vec<Level>| {
                levels.iter().map(move |&l| {
                    let mut v = prefix.clone();
                    v.push(l);
                    v
                })
            })
            .collect();
    }
    labels
        .into_iter()
        .flat_map(|ls| {
            let k = Label::Prod(ProdLabel::new(&ls).unwrap());
            [0, 1].map(move |n| LabeledValue::new(n, k))
        })
        .collect()
}

#[test]
fn reflexive_and_symmetric() {
    for name in ["two_point", "chain3", "fig5", "powerset(2)"] {
        let lat = LatticeSpec::builtin(name).unwrap();
        let values = lattice_values(&lat);
        for a in lat.elements() {
            let adv = Adversary::Level(a);
            for v in &values {
                assert!(value_equiv(EquivDef::Pua, &lat, adv, v, v).unwrap());
                for w in &values {
                    assert_eq!(
                        value_equiv(EquivDef::Pua, &lat, adv, v, w).unwrap(),
                        value_equiv(EquivDef::Pua, &lat, adv, w, v).unwrap()
                    );
                }
            }
        }
    }
    let p2 = LatticeSpec::powerset(2);
    let values = product_values(2);
    for i in 0..2 {
        let adv = Adversary::Principal(i);
        for v in &values {
            assert!(value_equiv(EquivDef::Pup, &p2, adv, v, v).unwrap());
            for w in &values {
                assert_eq!(
                    value_equiv(EquivDef::Pup, &p2, adv, v, w).unwrap(),
                    value_equiv(EquivDef::Pup, &p2, adv, w, v).unwrap()
                );
            }
        }
    }
}

#[test]
fn generalized_relation_is_not_transitive() {
    let two = LatticeSpec::two_point();
    let adv = Adversary::Level(two.bottom());
    let values = lattice_values(&two);
    let eq = |a: &LabeledValue, b: &LabeledValue| value_equiv(EquivDef::Pua, &two, adv, a, b).unwrap();
    let mut witnesses = Vec::new();
    for a in &values {
        for b in &values {
            for c in &values {
                if eq(a, b) && eq(b, c) && !eq(a, c) {
                    witnesses.push((*a, *b, *c));
                }
            }
        }
    }
    assert!(!witnesses.is_empty());
    let low = Label::Pure(two.bottom());
    let lstar = Label::Star(two.bottom());
    let (a, b, c) = (
        LabeledValue::new(0, low),
        LabeledValue::new(0, lstar),
        LabeledValue::new(1, low),
    );
    assert!(witnesses.contains(&(a, b, c)));
}

#[test]
fn pup_is_pointwise_two_point() {
    // Per principal, the product relation is the two-point relation on the
    // projected labels.
    let p2 = LatticeSpec::powerset(2);
    let two = LatticeSpec::two_point();
    let values = product_values(2);
    for i in 0..2 {
        for v in &values {
            for w in &values {
                let prod = value_equiv(EquivDef::Pup, &p2, Adversary::Principal(i), v, w).unwrap();
                let (pv, pw) = (project_value(v, i).unwrap(), project_value(w, i).unwrap());
                let flat = value_equiv(EquivDef::Pus2, &two, Adversary::Level(two.bottom()), &pv, &pw).unwrap();
                assert_eq!(prod, flat);
            }
        }
    }
}

#[test]
fn kind_mismatches_are_errors() {
    let two = LatticeSpec::two_point();
    let v = LabeledValue::new(0, Label::Pure(two.bottom()));
    let p = LabeledValue::new(0, Label::Prod(ProdLabel::bottom(1)));
    assert!(value_equiv(EquivDef::Pup, &two, Adversary::Level(two.bottom()), &v, &v).is_err());
    assert!(value_equiv(EquivDef::Basic, &two, Adversary::Principal(0), &v, &v).is_err());
    assert!(value_equiv(EquivDef::Pua, &two, Adversary::Level(two.bottom()), &v, &p).is_err());
    let h = Adversary::Level(two.elem("H").unwrap());
    assert!(value_equiv(EquivDef::Pus2, &two, h, &v, &v).is_err());
    assert_eq!(EquivDef::select(Strategy::Pus2, &two, h), EquivDef::Pua);
}

fn lattice_and_label() -> impl proptest::strategy::Strategy<Value = (usize, usize, bool)> {
    (0usize..4, 0usize..16, any::<bool>())
}

proptest! {
    #[test]
    fn label_text_round_trips((which, i, star) in lattice_and_label()) {
        let lat = LatticeSpec::builtin(["two_point", "chain3", "fig5", "powerset(2)"][which]).unwrap();
        let e = lat.elements().nth(i % lat.len()).unwrap();
        let k = if star { Label::Star(e) } else { Label::Pure(e) };
        let text = k.display(&lat).to_string();
        prop_assert_eq!(Label::parse(&text, LabelFamily::Lattice, &lat).unwrap(), k);
    }

    #[test]
    fn product_label_text_round_trips(levels in prop::collection::vec(0usize..3, 1..=4)) {
        let ls: Vec<Level> = levels.iter().map(|&i| [Level::L, Level::H, Level::P][i]).collect();
        let k = Label::Prod(ProdLabel::new(&ls).unwrap());
        let lat = LatticeSpec::powerset(ls.len());
        let fam = LabelFamily::Product { arity: ls.len() };
        let comma = k.display(&lat).to_string();
        prop_assert_eq!(Label::parse(&comma, fam, &lat).unwrap(), k);
        let compact: String = comma.split(',').collect();
        prop_assert_eq!(Label::parse(&compact, fam, &lat).unwrap(), k);
    }

    #[test]
    fn label_join_laws(which in 0usize..3, a in 0usize..14, b in 0usize..14, c in 0usize..14) {
        let lat = LatticeSpec::builtin(["two_point", "chain3", "fig5"][which]).unwrap();
        let universe = label_universe(Strategy::Pua, &lat, LabelFamily::Lattice);
        let pick = |i: usize| universe[i % universe.len()];
        let (a, b, c) = (pick(a), pick(b), pick(c));
        let j = |x: Label, y: Label| x.join(y, &lat).unwrap();
        prop_assert_eq!(j(a, b), j(b, a));
        prop_assert_eq!(j(a, j(b, c)), j(j(a, b), c));
        prop_assert_eq!(j(a, a), a);
        prop_assert_eq!(j(a, b).is_star(), a.is_star() || b.is_star());
        prop_assert_eq!(
            j(a, b).pure_bound().unwrap(),
            lat.join(a.pure_bound().unwrap(), b.pure_bound().unwrap())
        );
    }

    #[test]
    fn product_join_is_pointwise(x in prop::collection::vec(0usize..3, 3), y in prop::collection::vec(0usize..3, 3)) {
        let lv = |i: usize| [Level::L, Level::H, Level::P][i];
        let p = ProdLabel::new(&x.iter().map(|&i| lv(i)).collect::<Vec<_>>()).unwrap();
        let q = ProdLabel::new(&y.iter().map(|&i| lv(i)).collect::<Vec<_>>()).unwrap();
        let r = p.join(q).unwrap();
        for i in 0..3 {
            prop_assert_eq!(r.get(i), p.get(i).join(q.get(i)));
        }
        prop_assert_eq!(r.is_pure(), p.is_pure() && q.is_pure());
    }
}
