//! Round trips and malformed-input fuzzing for the on-disk formats.

mod common;

use fgim_core::io::{decode_fvecs, decode_index, decode_ivecs, encode_fvecs, encode_index, encode_ivecs};
use fgim_core::{Dataset, Error, Metric, PointSet};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Straightforward reader: `None` for anything malformed.
fn reference_records(bytes: &[u8]) -> Option<Vec<Vec<[u8; 4]>>> {
    let mut out = Vec::new();
    let mut dim = None;
    let mut rest = bytes;
    while !rest.is_empty() {
        let head: [u8; 4] = rest.get(..4)?.try_into().ok()?;
        let d = i32::from_le_bytes(head);
        if d <= 0 || dim.is_some_and(|x| x != d) {
            return None;
        }
        dim = Some(d);
        rest = &rest[4..];
        let len = d as usize * 4;
        let body = rest.get(..len)?;
        out.push(body.chunks_exact(4).map(|c| c.try_into().unwrap()).collect());
        rest = &rest[len..];
    }
    Some(out)
}

fn mutate(mut bytes: Vec<u8>, op: u8, at: usize, val: u8) -> Vec<u8> {
    if bytes.is_empty() {
        return vec![val];
    }
    let at = at % bytes.len();
    match op % 4 {
        0 => bytes.truncate(at),
        1 => bytes[at] ^= val | 1,
        2 => bytes.push(val),
        _ => bytes.splice(at..at, [val, 0, 0, 0]).for_each(drop),
    }
    bytes
}

fn is_format(e: &Error) -> bool {
    matches!(e, Error::Format(_))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn index_round_trips(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = common::random_graph(&mut rng, 200, 24);
        let bytes = encode_index(&g);
        prop_assert_eq!(decode_index(&bytes).unwrap(), g);
    }

    #[test]
    fn corrupted_index_is_rejected_or_valid(seed in any::<u64>(), op in any::<u8>(), at in any::<usize>(), val in any::<u8>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = common::random_graph(&mut rng, 50, 8);
        match decode_index(&mutate(encode_index(&g), op, at, val)) {
            Ok(h) => prop_assert!(h.validate().is_ok()),
            Err(e) => prop_assert!(is_format(&e), "{:?}", e),
        }
    }

    #[test]
    fn fvecs_round_trips(rows in prop::collection::vec(prop::collection::vec(-1e6f32..1e6, 7), 0..40)) {
        let ds = Dataset::from_rows(&rows, Metric::Euclidean).unwrap();
        let back = decode_fvecs(&encode_fvecs(&ds), Metric::Euclidean).unwrap();
        prop_assert_eq!(back.len(), ds.len());
        prop_assert_eq!(back.as_flat(), ds.as_flat());
    }

    #[test]
    fn fvecs_decoder_agrees_with_reference(
        rows in prop::collection::vec(prop::collection::vec(-5.0f32..5.0, 3), 0..10),
        op in any::<u8>(), at in any::<usize>(), val in any::<u8>(),
    ) {
        let ds = Dataset::from_rows(&rows, Metric::Euclidean).unwrap();
        let bytes = mutate(encode_fvecs(&ds), op, at, val);
        let want = reference_records(&bytes).and_then(|recs| {
            let flat: Vec<f32> = recs.iter().flatten().map(|b| f32::from_le_bytes(*b)).collect();
            flat.iter().all(|x| x.is_finite()).then_some(flat)
        });
        match (decode_fvecs(&bytes, Metric::Euclidean), want) {
            (Ok(got), Some(flat)) => prop_assert_eq!(got.as_flat(), &flat[..]),
            (Err(e), None) => prop_assert!(is_format(&e), "{:?}", e),
            (got, want) => prop_assert!(false, "decoder {:?} vs reference {:?}", got.map(|d| d.len()), want),
        }
    }

    #[test]
    fn ivecs_decoder_agrees_with_reference(
        ids in prop::collection::vec(prop::collection::vec(0u32..1000, 4), 0..10),
        op in any::<u8>(), at in any::<usize>(), val in any::<u8>(),
    ) {
        let clean = encode_ivecs(&ids);
        prop_assert_eq!(&decode_ivecs(&clean).unwrap().ids, &ids);
        let bytes = mutate(clean, op, at, val);
        let want = reference_records(&bytes).and_then(|recs| {
            recs.iter()
                .map(|r| r.iter().map(|b| u32::try_from(i32::from_le_bytes(*b)).ok()).collect::<Option<Vec<u32>>>())
                .collect::<Option<Vec<_>>>()
        });
        match (decode_ivecs(&bytes), want) {
            (Ok(got), Some(rows)) => prop_assert_eq!(got.ids, rows),
            (Err(e), None) => prop_assert!(is_format(&e), "{:?}", e),
            (got, want) => prop_assert!(false, "decoder {:?} vs reference {:?}", got.map(|t| t.len()), want),
        }
    }
}
