mod common;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use jumpgen::values::{RadicalBasis, Value};

fn value(c: [(i64, i64); 3]) -> Value {
    let basis = RadicalBasis::new(&[1, 2, 51]).unwrap();
    let coeffs = c.iter().map(|&(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d))).collect();
    Value::from_coeffs(&basis, coeffs).unwrap()
}

fn coeffs() -> impl Strategy<Value = [(i64, i64); 3]> {
    let q = (-60i64..=60, 1i64..=7);
    [q.clone(), q.clone(), q]
}

proptest! {
    #[test]
    fn display_parses_back(c in coeffs()) {
        let v = value(c);
        let back = Value::parse(v.basis(), &v.to_string()).unwrap();
        prop_assert_eq!(back, v);
    }

    #[test]
    fn order_agrees_with_floats(a in coeffs(), b in coeffs()) {
        let (a, b) = (value(a), value(b));
        let gap = a.to_f64() - b.to_f64();
        if gap.abs() > 1e-9 {
            prop_assert_eq!(a < b, gap < 0.0);
        }
        prop_assert_eq!(a.cmp(&b), (&a - &b).cmp(&Value::zero(a.basis())));
    }

    #[test]
    fn addition_is_exact(a in coeffs(), b in coeffs()) {
        let (a, b) = (value(a), value(b));
        prop_assert_eq!(&(&a + &b) - &b, a);
    }
}

#[test]
fn truncated_chains_are_prefixes() {
    let (c, full) = common::example();
    for k in [1, 3, 5, 8, 12] {
        let mut config = c.clone();
        config.bounds.max_global_index = k;
        let cut = common::build(&config);
        assert_eq!(cut.t_chain().len(), k);
        for (a, b) in cut.t_chain().iter().zip(full.t_chain()) {
            assert_eq!(a.poly, b.poly, "T{} differs when cut at {k}", a.index);
            assert_eq!(a.gamma, b.gamma);
        }
        assert!(cut.flags().truncated(), "cut at {k}: {:?}", cut.flags());
    }
}

#[test]
fn successor_relation_is_consistent() {
    let (_, s) = common::example();
    let n = s.t_chain().len();
    for i in 1..=n {
        for j in s.successors(i) {
            assert!(j > i);
            assert!(s.is_successor(i, j));
            let (a, b) = (s.t(i).unwrap(), s.t(j).unwrap());
            if !b.is_zero() {
                assert!(a.gamma < b.gamma, "T{j} does not exceed T{i}");
            }
        }
    }
}
