use proptest::prelude::*;

use lietype::cohomology::{dim_g, em_collapse_check, koszul_tor, module_rank_one_check, poincare_series, Selector};
use lietype::invariants::DEFAULT_CAP;
use lietype::padic::{
    closed_subgroup_equal, generated_subgroup_descriptor, mult_order, subgroup_membership, teichmuller_lift,
    unit_valuation, untwist_factor, PAdicUnit, Valuation,
};
use lietype::pipeline::{
    classification_key, datum_from_label, fingerprint, fundamental_class_verdict, untwist, VerdictStatus,
};
use lietype::rootdata::{product, DatumAutomorphism, Label, RootDatum};

const SMALL_LABELS: &[&str] = &["A1", "A2", "A1ad", "B2", "B2ad", "G2", "T1", "GL2", "A3", "C3", "B3ad"];

fn label() -> impl Strategy<Value = &'static str> {
    proptest::sample::select(SMALL_LABELS)
}

fn prime() -> impl Strategy<Value = u64> {
    proptest::sample::select(vec![2u64, 3, 5, 7, 11])
}

fn unit() -> impl Strategy<Value = PAdicUnit> {
    (prime(), 1u32..=10, 1i64..1_000_000).prop_filter_map("unit", |(l, k, v)| PAdicUnit::new(v as i128, l, k).ok())
}

fn degree_list() -> impl Strategy<Value = Vec<u32>> {
    proptest::collection::vec(1u32..=6, 0..=3).prop_map(|mut v| {
        v.sort();
        v
    })
}

fn datum(s: &str) -> RootDatum {
    datum_from_label(s).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn untwist_factor_invariants(q in unit()) {
        let f = untwist_factor(&q);
        prop_assert!(f.zeta.pow(f.e).is_one());
        prop_assert_eq!(f.zeta.mul(&f.q_prime).unwrap(), q);
        prop_assert_eq!(f.q_prime.residue() % q.prime(), 1 % q.prime());
        prop_assert_eq!(f.e, mult_order(&q));
        prop_assert_eq!(teichmuller_lift(&f.zeta), f.zeta);
        prop_assert!(f.zeta.is_root_of_unity());
    }

    #[test]
    fn inverse_and_powers(q in unit(), n in 0u64..50) {
        prop_assert!(q.mul(&q.inverse()).unwrap().is_one());
        prop_assert_eq!(q.pow(n).mul(&q).unwrap(), q.pow(n + 1));
    }

    #[test]
    fn closed_subgroups_are_symmetric(a in unit(), b in 1i64..1000) {
        let Ok(b) = PAdicUnit::new(b as i128, a.prime(), a.precision()) else { return Ok(()) };
        match (closed_subgroup_equal(&a, &b), closed_subgroup_equal(&b, &a)) {
            (Ok(x), Ok(y)) => prop_assert_eq!(x, y),
            (Err(_), Err(_)) => {}
            other => prop_assert!(false, "asymmetric result {other:?}"),
        }
        if let Ok(eq) = closed_subgroup_equal(&a, &a.inverse()) {
            prop_assert!(eq);
        }
    }

    #[test]
    fn generated_subgroup_contains_its_generator(q in unit()) {
        if let Ok(s) = generated_subgroup_descriptor(&q) {
            prop_assert!(subgroup_membership(&q, &s).unwrap());
            prop_assert!(subgroup_membership(&q.pow(3), &s).unwrap());
        }
    }

    #[test]
    fn valuation_of_q_prime_is_positive(q in unit()) {
        match unit_valuation(&untwist_factor(&q).q_prime) {
            Valuation::Finite(v) => prop_assert!(v >= 1 && v < q.precision()),
            Valuation::AtPrecision => {}
        }
    }

    #[test]
    fn product_is_associative_on_fingerprints(a in label(), b in label(), c in label()) {
        let (a, b, c) = (datum(a), datum(b), datum(c));
        let left = product(&product(&a, &b).unwrap(), &c).unwrap();
        let right = product(&a, &product(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(fingerprint(&left, DEFAULT_CAP).unwrap(), fingerprint(&right, DEFAULT_CAP).unwrap());
        prop_assert!(left.validate().is_empty());
    }

    #[test]
    fn label_and_datum_files_round_trip(a in label(), b in label()) {
        let s = format!("{a}x{b}");
        let l: Label = s.parse().unwrap();
        prop_assert_eq!(l.to_string().parse::<Label>().unwrap(), l.clone());
        let d = RootDatum::from_label(&l).unwrap();
        let back = RootDatum::from_json_str(&d.to_canonical_json()).unwrap();
        prop_assert_eq!(back.to_canonical_json(), d.to_canonical_json());
        prop_assert!(back.matches_label().unwrap());
    }

    #[test]
    fn verdicts_close_under_products(a in label(), b in label(), l in prime()) {
        let (da, db) = (datum(a), datum(b));
        let va = fundamental_class_verdict(&da, &DatumAutomorphism::identity(da.rank()), l).unwrap();
        let vb = fundamental_class_verdict(&db, &DatumAutomorphism::identity(db.rank()), l).unwrap();
        let p = product(&da, &db).unwrap();
        let vp = fundamental_class_verdict(&p, &DatumAutomorphism::identity(p.rank()), l).unwrap();
        if va.status.is_guaranteed() && vb.status.is_guaranteed() {
            prop_assert!(vp.status.is_guaranteed(), "{a} x {b} at {l}: {vp:?}");
        }
        if vp.status == VerdictStatus::GuaranteedThmExamples {
            prop_assert!(va.status.is_guaranteed() && vb.status.is_guaranteed());
        }
    }

    #[test]
    fn keys_agree_for_high_power_replacements(l in proptest::sample::select(vec![3u64, 5, 7]), v in 2i64..200, k in 2u32..=6) {
        // the unit group mod l^k has exponent dividing (l - 1) l^10 for k <= 11
        let Ok(q) = PAdicUnit::new(v as i128, l, k) else { return Ok(()) };
        let q2 = q.pow(1 + (l - 1) * l.pow(10));
        prop_assert_eq!(q, q2);
        let a2 = datum("A2");
        let id = DatumAutomorphism::identity(2);
        let k1 = classification_key(&untwist(&a2, &id, &q, DEFAULT_CAP).unwrap()).ok();
        let k2 = classification_key(&untwist(&a2, &id, &q2, DEFAULT_CAP).unwrap()).ok();
        prop_assert_eq!(k1, k2);
    }

    #[test]
    fn untwisting_is_trivial_when_q_is_one_mod_l(a in label(), l in prime(), m in 1i64..100) {
        let d = datum(a);
        let q = PAdicUnit::new(1 + (l as i128) * m as i128, l, 6).unwrap();
        let r = untwist(&d, &DatumAutomorphism::identity(d.rank()), &q, DEFAULT_CAP).unwrap();
        prop_assert_eq!(r.e, 1);
        prop_assert!(r.tau_e.is_identity());
        prop_assert_eq!(r.fingerprint().unwrap(), fingerprint(&d, DEFAULT_CAP).unwrap());
    }

    #[test]
    fn koszul_totals_match_series(degs in degree_list(), l in proptest::sample::select(vec![2u64, 3, 5])) {
        let n = 24;
        let r = em_collapse_check(&degs, n, l).unwrap();
        prop_assert!(r.passed, "{degs:?}: {r:?}");
        let tor = koszul_tor(&degs, n, l).unwrap();
        for (s, t, _) in tor.entries() {
            prop_assert!(s <= 0 && -s <= degs.len() as i64 && t >= 0);
        }
    }

    #[test]
    fn rank_one_generator_at_top_degree(degs in degree_list()) {
        let r = module_rank_one_check(&degs, 20).unwrap();
        prop_assert!(r.passed);
        prop_assert_eq!(r.generator, (0, dim_g(&degs)));
    }

    #[test]
    fn lbg_and_bgq_series_coincide(degs in degree_list()) {
        let lbg = poincare_series(&degs, Selector::Lbg);
        prop_assert_eq!(&lbg, &poincare_series(&degs, Selector::Bgq));
        let expected = poincare_series(&degs, Selector::Bg).mul(&poincare_series(&degs, Selector::G));
        prop_assert_eq!(lbg, expected);
    }
}
