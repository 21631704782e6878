use std::sync::Arc;

use proptest::prelude::*;

use trunclab::kernel_frame::{kernel_frame, Bounds, KernelFrameBundle};
use trunclab::lattice::{FiniteFrame, Poset};
use trunclab::represent::underline::underline;
use trunclab::trunc::{Carrier, Kernel, Support, TruncElement};
use trunclab::{Scalar, Q};

fn frames() -> Vec<Arc<FiniteFrame>> {
    (0..=4).flat_map(Poset::enumerate).map(|p| Arc::new(FiniteFrame::build(p).unwrap())).collect()
}

fn q(p: i64, d: i64) -> Q {
    Q::ratio(p, d)
}

/// Kernel frame atom for each coordinate, found from the indicator kernels.
fn atom_order(b: &KernelFrameBundle<Q>) -> Vec<usize> {
    let atoms = b.frame.centre_atoms();
    (0..b.carrier.dim().unwrap())
        .map(|i| {
            let e = b.element_of(&Kernel::from_support(&b.carrier, Support::finite([i])));
            atoms.iter().position(|&a| a == e).expect("indicator kernels are atoms")
        })
        .collect()
}

fn carrier_and_pair() -> impl Strategy<Value = (Vec<Q>, Vec<Q>, Vec<Q>)> {
    (1usize..=3).prop_flat_map(|n| {
        let unit = prop::collection::vec((1i64..=12, 1i64..=12).prop_map(|(p, d)| q(p, d)), n);
        let coord = (-24i64..=24, 1i64..=12).prop_map(|(p, d)| q(p, d));
        (unit, prop::collection::vec(coord.clone(), n), prop::collection::vec(coord, n))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn heyting_arrow_is_residuation(idx in 0usize..1000, i in 0usize..64, j in 0usize..64, k in 0usize..64) {
        let all = frames();
        let f = &all[idx % all.len()];
        let el = f.elements();
        let (a, b, c) = (el[i % el.len()], el[j % el.len()], el[k % el.len()]);
        let ab = f.arrow(a, b).unwrap();
        prop_assert_eq!(f.leq(c, ab), f.leq(f.meet(c, a), b));
        prop_assert_eq!(f.meet(a, f.join(b, c)), f.join(f.meet(a, b), f.meet(a, c)));
    }

    #[test]
    fn underline_reads_scaled_coordinates((unit, x, y) in carrier_and_pair()) {
        let c = Carrier::<Q>::fin_vec(unit.clone()).unwrap();
        let b = kernel_frame(&c, Bounds::default()).unwrap();
        let order = atom_order(&b);
        let expect = |v: &[Q]| {
            let mut t = vec![q(0, 1); v.len()];
            for (i, &pos) in order.iter().enumerate() {
                t[pos] = v[i].clone() / unit[i].clone();
            }
            t
        };
        let (a, bb) = (TruncElement::tuple(&c, x.clone()).unwrap(), TruncElement::tuple(&c, y.clone()).unwrap());
        let (ua, ub) = (underline(&b, &a).unwrap(), underline(&b, &bb).unwrap());
        prop_assert_eq!(ua.to_tuple(), expect(&x));
        let sum: Vec<Q> = x.iter().zip(&y).map(|(p, r)| p + r).collect();
        prop_assert_eq!(ua.add(&ub).unwrap().to_tuple(), expect(&sum));
        let meet: Vec<Q> = x.iter().zip(&y).map(|(p, r)| p.clone().min(r.clone())).collect();
        prop_assert_eq!(ua.meet(&ub).unwrap().to_tuple(), expect(&meet));
        let abs = a.abs();
        let capped: Vec<Q> = (0..unit.len()).map(|i| abs.at(i).min(unit[i].clone())).collect();
        prop_assert_eq!(underline(&b, &abs).unwrap().truncate_at_one().to_tuple(), expect(&capped));
    }
}
