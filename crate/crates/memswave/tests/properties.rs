//! Property tests for the sequence-space algebra and the interval carrier.

use memswave::interval::Interval;
use memswave::seqspace::{ChebSeq, Weight};
use proptest::prelude::*;

fn seq_strategy(max_len: usize) -> impl Strategy<Value = ChebSeq<f64>> {
    prop::collection::vec(-1.0f64..1.0, 1..max_len).prop_map(ChebSeq::new)
}

proptest! {
    #[test]
    fn conv_commutes(a in seq_strategy(16), b in seq_strategy(16)) {
        let ab = a.conv(&b);
        let ba = b.conv(&a);
        prop_assert_eq!(ab.len(), ba.len());
        for n in 0..ab.len() {
            prop_assert!((ab.get(n) - ba.get(n)).abs() <= 1e-13 * (1.0 + ab.get(n).abs()));
        }
    }

    #[test]
    fn conv_associates(a in seq_strategy(10), b in seq_strategy(10), c in seq_strategy(10)) {
        let left = a.conv(&b).conv(&c);
        let right = a.conv(&b.conv(&c));
        prop_assert_eq!(left.len(), right.len());
        for n in 0..left.len() {
            let scale = 1.0 + left.get(n).abs().max(right.get(n).abs());
            prop_assert!((left.get(n) - right.get(n)).abs() <= 1e-13 * scale);
        }
    }

    #[test]
    fn banach_algebra_inequality(a in seq_strategy(16), b in seq_strategy(16)) {
        let w = Weight::geometric(1.05);
        prop_assert!(a.conv(&b).norm(&w) <= a.norm(&w) * b.norm(&w) * (1.0 + 1e-12));
    }

    #[test]
    fn dual_pairing(a in seq_strategy(16), c in seq_strategy(20)) {
        let w = Weight::geometric(1.05);
        let pair: f64 = (0..c.len().max(a.len())).map(|n| c.get(n) * a.get(n)).sum();
        prop_assert!(pair.abs() <= c.dual_norm(&w) * a.norm(&w) * (1.0 + 1e-12));
    }

    #[test]
    fn eval_is_multiplicative(a in seq_strategy(8), b in seq_strategy(8), y in -1.0f64..1.0) {
        let lhs = a.conv(&b).eval(y).unwrap();
        let rhs = a.eval(y).unwrap() * b.eval(y).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
    }

    #[test]
    fn interval_ops_contain_samples(
        x0 in -5.0f64..5.0, wx in 0.0f64..2.0, tx in 0.0f64..1.0,
        y0 in -5.0f64..5.0, wy in 0.0f64..2.0, ty in 0.0f64..1.0,
    ) {
        let x = Interval::new(x0, x0 + wx);
        let y = Interval::new(y0, y0 + wy);
        let px = x0 + tx * wx;
        let py = y0 + ty * wy;
        prop_assert!((x + y).contains(px + py));
        prop_assert!((x - y).contains(px - py));
        prop_assert!((x * y).contains(px * py));
        if !y.contains_zero() {
            prop_assert!((x / y).contains(px / py));
        }
    }
}
