mod common;

use common::{exhaustive_mul_mismatches, word};
use fixposit::format::validate;
use fixposit::multiplier::{mul_datapath, mul_reference};
use fixposit::RoundingMode;

#[test]
fn datapath_reference_and_value_oracle_agree_exhaustively() {
    for (n, es, rs) in [(6, 1, 2), (8, 2, 2), (8, 3, 1), (8, 0, 4), (9, 1, 3), (10, 3, 2)] {
        let f = validate(n, es, rs).unwrap();
        let (mismatches, examples) = exhaustive_mul_mismatches(f, true);
        assert_eq!(mismatches, 0, "{}", examples.join("\n"));
    }
}

#[test]
fn datapath_matches_reference_at_twelve_bits() {
    let f = validate(12, 4, 2).unwrap();
    let (mismatches, examples) = exhaustive_mul_mismatches(f, false);
    assert_eq!(mismatches, 0, "{}", examples.join("\n"));
}

#[test]
fn commutative_and_identity_exhaustive() {
    let f = validate(10, 3, 2).unwrap();
    let one = fixposit::codec::from_binary32(1.0f32.to_bits(), f, RoundingMode::NearestEven);
    for a in 0..1024u64 {
        let wa = word(a, f);
        let canon = fixposit::codec::is_canonical(&wa);
        let id = mul_datapath(&wa, &one).unwrap();
        if wa.is_nar() || wa.is_zero() {
            assert_eq!(id, wa);
        } else if canon {
            assert_eq!(id, wa, "{a:#x}");
        } else {
            assert!(id.decode().same_value(&wa.decode()));
        }
        for b in 0..1024u64 {
            let wb = word(b, f);
            assert_eq!(mul_datapath(&wa, &wb).unwrap(), mul_datapath(&wb, &wa).unwrap());
        }
    }
}

#[test]
fn sign_rule_holds_for_normal_operands() {
    let f = validate(10, 2, 3).unwrap();
    for a in 1..1024u64 {
        for b in 1..1024u64 {
            let (wa, wb) = (word(a, f), word(b, f));
            if wa.is_nar() || wb.is_nar() {
                continue;
            }
            let c = mul_reference(&wa, &wb, RoundingMode::NearestEven).unwrap();
            assert_eq!(c.is_negative(), wa.is_negative() != wb.is_negative(), "{a:#x} {b:#x}");
        }
    }
}
