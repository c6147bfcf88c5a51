use proptest::collection::vec;
use proptest::prelude::*;
use wordpca::core::{fit_pca, EmbeddingSet};
use wordpca::formats::{parse_embeddings, pcam, serialize_to_vec};
use wordpca::EmbeddingFormat;

/// Distinct tokens without spaces or newlines, some non-ASCII.
fn tokens(n: usize) -> impl Strategy<Value = Vec<Vec<u8>>> {
    proptest::collection::btree_set("[a-zA-Z0-9_.,'éß中-]{1,12}", n)
        .prop_map(|s| s.into_iter().map(String::into_bytes).collect())
}

fn finite_f32() -> impl Strategy<Value = f32> {
    prop_oneof![-1.0f32..1.0, any::<f32>().prop_filter("finite", |v| v.is_finite()), Just(0.0f32), Just(-0.0f32),]
}

fn embedding_set() -> impl Strategy<Value = EmbeddingSet> {
    (1usize..20, 1usize..10).prop_flat_map(|(n, d)| {
        (tokens(n), vec(finite_f32(), n * d)).prop_map(move |(words, data)| EmbeddingSet::new(words, d, data).unwrap())
    })
}

fn ulps_apart(a: f32, b: f32) -> u32 {
    let key = |v: f32| {
        let bits = v.to_bits() as i64;
        if bits < 0x8000_0000 {
            bits
        } else {
            0x8000_0000 - bits
        }
    };
    (key(a) - key(b)).unsigned_abs() as u32
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn binary_round_trip_is_bit_exact(e in embedding_set()) {
        let bytes = serialize_to_vec(&e, EmbeddingFormat::Word2vecBinary).unwrap();
        let back = parse_embeddings(&bytes[..], EmbeddingFormat::Word2vecBinary).unwrap();
        prop_assert_eq!(back, e);
    }

    #[test]
    fn text_round_trips_within_one_ulp(e in embedding_set()) {
        for format in [EmbeddingFormat::GloveText, EmbeddingFormat::Word2vecText] {
            let bytes = serialize_to_vec(&e, format).unwrap();
            let back = parse_embeddings(&bytes[..], format).unwrap();
            prop_assert_eq!(back.words(), e.words());
            prop_assert_eq!(back.dim(), e.dim());
            for (a, b) in back.as_slice().iter().zip(e.as_slice()) {
                prop_assert!(ulps_apart(*a, *b) <= 1, "{} vs {}", a, b);
            }
        }
    }
}

#[test]
fn pca_model_file_round_trip() {
    let e = EmbeddingSet::from_f64_rows(
        (0..12).map(|i| format!("t{i}").into_bytes()).collect(),
        3,
        &(0..12).flat_map(|i| [i as f64, (i * i) as f64 % 7.0, 1.0 / (1.0 + i as f64)]).collect::<Vec<_>>(),
    )
    .unwrap();
    let model = fit_pca(&e).unwrap();
    let mut buf = Vec::new();
    pcam::write_model(&model, &mut buf).unwrap();
    assert_eq!(buf.len(), 12 + 8 * (3 + 9 + 3));
    let back = pcam::read_model(&buf[..]).unwrap();
    assert_eq!(back, model);
    assert_eq!(pcam::read_model(&buf[..buf.len() - 1]).unwrap_err().name(), "TruncatedInput");
}

#[test]
fn cross_format_conversion_preserves_set() {
    let e = EmbeddingSet::new(vec![b"a".to_vec(), b"b".to_vec()], 2, vec![0.1, -2.5e-8, 3.0e20, 7.0]).unwrap();
    let bin = serialize_to_vec(&e, EmbeddingFormat::Word2vecBinary).unwrap();
    let mid = parse_embeddings(&bin[..], EmbeddingFormat::Word2vecBinary).unwrap();
    let text = serialize_to_vec(&mid, EmbeddingFormat::GloveText).unwrap();
    assert_eq!(parse_embeddings(&text[..], EmbeddingFormat::GloveText).unwrap(), e);
}
