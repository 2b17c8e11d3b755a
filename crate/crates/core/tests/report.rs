use proptest::prelude::*;

use piecevalue::report::{equalizers, relative_values, round_to, Coefficients, ReportError, EQUALIZER_STEP};
use piecevalue::rules::Variant;

proptest! {
    #[test]
    fn ratio_times_pawn_is_the_raw_value(
        pawn in prop_oneof![-400.0f64..-1.0, 1.0f64..400.0],
        pieces in prop::array::uniform4(-2000.0f64..2000.0),
    ) {
        let fit = Coefficients::new([
            ("pawn", pawn),
            ("knight", pieces[0]),
            ("bishop", pieces[1]),
            ("rook", pieces[2]),
            ("queen", pieces[3]),
        ]);
        let table = relative_values(&fit, Variant::Standard).unwrap();
        prop_assert_eq!(table.rows.len(), 4);
        for row in &table.rows {
            prop_assert!((row.ratio * pawn - row.raw).abs() <= 1e-9 * row.raw.abs().max(1.0));
            prop_assert_eq!(row.raw, fit.get(&row.term).unwrap());
        }
        prop_assert_eq!(table.notes.is_empty(), pawn > 0.0);
    }

    #[test]
    fn rounding_lands_on_the_step(v in -5000.0f64..5000.0) {
        let r = round_to(v, EQUALIZER_STEP);
        prop_assert!((r / EQUALIZER_STEP).fract() == 0.0);
        prop_assert!((r - v).abs() <= EQUALIZER_STEP / 2.0 + 1e-9);
    }
}

#[test]
fn near_zero_pawn_is_refused() {
    let fit = Coefficients::new([("pawn", 0.4), ("knight", 80.0)]);
    assert!(matches!(relative_values(&fit, Variant::Atomic), Err(ReportError::PawnNearZero { .. })));
    assert!(matches!(
        relative_values(&Coefficients::new([("knight", 1.0)]), Variant::Standard),
        Err(ReportError::NoPawn)
    ));
}

#[test]
fn equalizers_are_multiples_of_the_step() {
    let fit = Coefficients::new([("pawn", 93.0), ("knight", 262.0), ("bishop", 288.0), ("rook", 412.0), ("queen", 852.0)]);
    let eq = equalizers(&fit);
    assert!(!eq.rows.is_empty());
    for row in &eq.rows {
        assert_eq!((row.rounded / EQUALIZER_STEP).fract(), 0.0);
    }
}
