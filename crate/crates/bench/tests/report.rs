use fce_bench::report::{read_csv, write_csv, CsvRow, HEADER};
use fce_core::field::FceKind;
use fce_core::solver::CollocationKind;
use proptest::prelude::*;

fn metric() -> impl Strategy<Value = f64> {
    prop_oneof![
        8 => any::<f64>().prop_filter("finite", |v| v.is_finite()),
        1 => Just(f64::NAN),
        1 => Just(f64::INFINITY),
        1 => Just(0.0),
    ]
}

fn row() -> impl Strategy<Value = CsvRow> {
    (
        prop_oneof![Just("helmholtz1d"), Just("relbc2d"), Just("a,b \"quoted\"")],
        prop_oneof![Just(FceKind::C1), Just(FceKind::C0), Just(FceKind::Nc), Just(FceKind::MixedC1x), Just(FceKind::MixedC1y)],
        (1usize..64, 1usize..64, 1usize..20, 1usize..20, 2usize..30),
        prop_oneof![Just(CollocationKind::Gll), Just(CollocationKind::Uniform)],
        (metric(), metric(), metric(), metric(), metric()),
    )
        .prop_map(|(case, kind, (nx, ny, p, m, q), colloc, (linf, l2, residual, cond_est, wall_ms))| CsvRow {
            case: case.to_string(),
            kind,
            nx,
            ny,
            p,
            m,
            q,
            colloc,
            linf,
            l2,
            residual,
            cond_est,
            wall_ms,
        })
}

fn written(rows: &[CsvRow]) -> Vec<u8> {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows).unwrap();
    buf
}

proptest! {
    // Floats carry 15 significant digits, so the first write quantizes; every
    // parsed report then re-parses to bit-identical records.
    #[test]
    fn csv_round_trip_is_bitwise(rows in proptest::collection::vec(row(), 0..8)) {
        let first = written(&rows);
        prop_assert!(!String::from_utf8(first.clone()).unwrap().contains('\r'));
        let parsed = read_csv(first.as_slice()).unwrap();
        prop_assert_eq!(parsed.len(), rows.len());
        let second = written(&parsed);
        prop_assert_eq!(&first, &second);
        let again = read_csv(second.as_slice()).unwrap();
        for (a, b) in parsed.iter().zip(&again) {
            prop_assert!(a.same_bits(b), "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn written_floats_keep_fifteen_digits(v in any::<f64>().prop_filter("finite nonzero", |v| v.is_finite() && *v != 0.0)) {
        let row = CsvRow { linf: v, ..sample() };
        let back = read_csv(written(&[row]).as_slice()).unwrap();
        prop_assert!(((back[0].linf - v) / v).abs() <= 5e-15);
    }
}

fn sample() -> CsvRow {
    CsvRow {
        case: "helmholtz1d".into(),
        kind: FceKind::C1,
        nx: 4,
        ny: 1,
        p: 6,
        m: 6,
        q: 8,
        colloc: CollocationKind::Gll,
        linf: f64::NAN,
        l2: 1.0,
        residual: 0.5,
        cond_est: 10.0,
        wall_ms: 1.0,
    }
}

#[test]
fn header_is_fixed() {
    let mut buf = Vec::new();
    write_csv(&mut buf, &[]).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap(), format!("{}\n", HEADER.join(",")));
}

#[test]
fn foreign_header_is_rejected() {
    assert!(read_csv("a,b,c\n1,2,3\n".as_bytes()).is_err());
}
