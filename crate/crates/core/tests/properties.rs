//! Algebraic laws checked on generated inputs. Each proptest draws a seed
//! and hands it to the program generator, so failures print the seed that
//! reproduces them.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use proptest::prelude::*;
use rascal_light::ast::is_finite_subset_with;
use rascal_light::fuel::eval_expr_bounded;
use rascal_light::harness::gen::{Gen, GenBudget, Subset, ENTRY};
use rascal_light::harness::oracle::oracle_match;
use rascal_light::parser::{parse_module, parse_type, parse_value, render_module, render_type, render_value};
use rascal_light::pattern::match_pattern;
use rascal_light::traversal::reconstruct;
use rascal_light::typing::{lub, subtype, type_of, Type};
use rascal_light::validate::Module;
use rascal_light::value::{canonical_set, children, value_order, VTRes, Value};

fn budget() -> GenBudget {
    GenBudget::default()
}

fn values(seed: u64, n: u64) -> Vec<Value> {
    let b = budget();
    (0..n).map(|i| Gen::new(&b, seed, i).any_value(3)).collect()
}

fn types(seed: u64, n: u64) -> Vec<Type> {
    let b = budget();
    (0..n).map(|i| Gen::new(&b, seed, i).gen_type(2)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn value_order_is_a_total_order(seed in any::<u64>()) {
        let vs = values(seed, 3);
        let (a, b, c) = (&vs[0], &vs[1], &vs[2]);
        prop_assert_eq!(value_order(a, a), Ordering::Equal);
        prop_assert_eq!(value_order(a, b), value_order(b, a).reverse());
        prop_assert_eq!(value_order(a, b) == Ordering::Equal, a == b);
        if value_order(a, b) != Ordering::Greater && value_order(b, c) != Ordering::Greater {
            prop_assert_ne!(value_order(a, c), Ordering::Greater);
        }
    }

    #[test]
    fn canonical_sets_are_idempotent(seed in any::<u64>()) {
        let vs = values(seed, 5);
        let once = canonical_set(vs.iter().cloned());
        let Value::Set(items) = &once else { panic!("not a set") };
        prop_assert!(items.as_slice().windows(2).all(|w| value_order(&w[0], &w[1]) == Ordering::Less));
        prop_assert_eq!(canonical_set(items.as_slice().iter().cloned()), once.clone());
        let reversed = canonical_set(vs.iter().rev().cloned());
        prop_assert_eq!(reversed, once);
    }

    #[test]
    fn values_render_and_parse_back(seed in any::<u64>()) {
        for v in values(seed, 4) {
            let text = render_value(&v);
            prop_assert_eq!(parse_value(&text).unwrap(), v, "{}", text);
        }
    }

    #[test]
    fn types_render_and_parse_back(seed in any::<u64>()) {
        for t in types(seed, 4) {
            prop_assert_eq!(parse_type(&render_type(&t)).unwrap(), t);
        }
    }

    #[test]
    fn reconstructing_from_children_is_the_identity(seed in any::<u64>()) {
        let b = budget();
        let g = Gen::new(&b, seed, 0);
        let data = g.data().clone();
        for v in values(seed, 4) {
            prop_assert_eq!(reconstruct(&v, &children(&v), &data), Ok(v.clone()));
        }
    }

    #[test]
    fn subtyping_and_lub(seed in any::<u64>()) {
        let ts = types(seed, 3);
        let (a, b, c) = (&ts[0], &ts[1], &ts[2]);
        prop_assert!(subtype(a, a));
        prop_assert!(subtype(&Type::Void, a) && subtype(a, &Type::Value));
        let l = lub(a, b);
        prop_assert!(subtype(a, &l) && subtype(b, &l));
        prop_assert_eq!(&l, &lub(b, a));
        prop_assert_eq!(lub(a, a), a.clone());
        if subtype(a, c) && subtype(b, c) {
            prop_assert!(subtype(&l, c));
        }
        if subtype(a, b) && subtype(b, c) {
            prop_assert!(subtype(a, c));
        }
        if subtype(a, b) && subtype(b, a) {
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn generated_values_have_their_requested_type(seed in any::<u64>()) {
        let b = budget();
        let mut g = Gen::new(&b, seed, 0);
        let t = g.gen_type(2);
        let v = g.value_of(&t, 3);
        let actual = type_of(&v, g.data()).unwrap();
        prop_assert!(subtype(&actual, &t), "{} : {} not <: {}", render_value(&v), actual, t);
    }

    #[test]
    fn matching_agrees_with_the_oracle(seed in any::<u64>()) {
        let b = budget();
        let mut g = Gen::new(&b, seed, 0);
        let (p, v, store) = g.match_instance();
        let Ok(expected) = oracle_match(&p, &v, &store, g.data()) else { return Ok(()) };
        let got: BTreeSet<_> = match_pattern(&p, &v, &store, g.data()).into_iter().collect();
        prop_assert_eq!(got, expected);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generated_modules_are_well_formed(seed in any::<u64>()) {
        let b = budget();
        let def = Gen::new(&b, seed, 0).program(Subset::All);
        let text = render_module(&def);
        let m = Module::new(def.clone());
        prop_assert!(m.is_ok(), "{:?}\n{}", m.err(), text);
        prop_assert_eq!(parse_module(&text).unwrap(), def);
    }

    #[test]
    fn finite_subset_modules_stay_in_the_fragment(seed in any::<u64>()) {
        let b = budget();
        let def = Gen::new(&b, seed, 0).program(Subset::Finite);
        let m = Module::new(def).unwrap();
        for f in &m.def().functions {
            prop_assert!(is_finite_subset_with(&f.body, &|n| m.function(n).is_some()), "{}", f.name);
        }
    }

    #[test]
    fn more_fuel_never_changes_a_finished_result(seed in any::<u64>()) {
        let b = budget();
        let sc = Gen::new(&b, seed, 0).scenario(Subset::All);
        let m = Module::new(sc.module).unwrap();
        let body = &m.function(ENTRY).unwrap().body;
        let run = |fuel| eval_expr_bounded(&m, body, &sc.store, fuel, 200_000);
        for fuel in [3, 12, 40] {
            let Ok((small, s1)) = run(fuel) else { continue };
            if matches!(small, VTRes::Timeout) {
                continue;
            }
            let Ok((big, s2)) = run(fuel * 4) else { continue };
            prop_assert_eq!(&small, &big);
            prop_assert_eq!(s1, s2);
        }
    }
}
