//! Property tests for the value-level invariants.

use fibjones::braid::{format_braid, parse_braid, BraidWord};
use fibjones::fibrep::{zeckendorf_decode, zeckendorf_encode, Symbol, SymbolString};
use proptest::prelude::*;

fn arb_braid(max_n: usize, max_len: usize) -> impl Strategy<Value = BraidWord> {
    (2..=max_n).prop_flat_map(move |n| {
        proptest::collection::vec((1..n as i32, proptest::bool::ANY), 0..=max_len).prop_map(
            move |gens| {
                let word = gens
                    .into_iter()
                    .map(|(i, neg)| if neg { -i } else { i })
                    .collect();
                BraidWord::new(n, word).unwrap()
            },
        )
    })
}

fn arb_symbol_string(max_len: usize) -> impl Strategy<Value = SymbolString> {
    proptest::collection::vec(proptest::bool::ANY, 1..=max_len).prop_map(|bits| {
        // Repair adjacent stars so every vector maps to a legal string.
        let mut symbols = Vec::with_capacity(bits.len());
        let mut prev_star = false;
        for b in bits {
            let star = b && !prev_star;
            symbols.push(if star { Symbol::Star } else { Symbol::P });
            prev_star = star;
        }
        SymbolString::new(symbols).unwrap()
    })
}

proptest! {
    #[test]
    fn braid_text_round_trips(b in arb_braid(6, 10)) {
        let text = format_braid(&b);
        prop_assert_eq!(parse_braid(&text).unwrap(), b.clone());
        // format → parse → format is a fixed point
        prop_assert_eq!(format_braid(&parse_braid(&text).unwrap()), text);
    }

    #[test]
    fn writhe_is_additive(a in arb_braid(5, 8), b in arb_braid(5, 8)) {
        prop_assume!(a.strands() == b.strands());
        let ab = a.compose(&b).unwrap();
        prop_assert_eq!(ab.writhe(), a.writhe() + b.writhe());
        prop_assert_eq!(a.inverse().writhe(), -a.writhe());
    }

    #[test]
    fn inverse_is_an_involution(b in arb_braid(6, 10)) {
        prop_assert_eq!(b.inverse().inverse(), b);
    }

    #[test]
    fn zeckendorf_round_trips(s in arb_symbol_string(24)) {
        let z = zeckendorf_encode(&s);
        prop_assert_eq!(zeckendorf_decode(s.len(), z).unwrap(), s);
    }
}
