use fmtree::locate::{early_leaf, expand_node, retrieve_sampled, UNBOUNDED};
use fmtree::oracle::{naive_count, naive_locate, naive_suffix_array, suffix_sort_locate};
use fmtree::{
    build_suffix_array, derive_bwt, normalize, Engine, FmIndex, FmTreeConfig, Mechanism, PackedText,
    Pattern, RawText, SaRange, SamplingStrategy, SourceFormat,
};
use proptest::prelude::*;

fn text_strategy(max: usize) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..4, 1..max)
}

fn pattern_strategy() -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..4, 1..7)
}

fn strategy_of(value: bool) -> SamplingStrategy {
    if value {
        SamplingStrategy::Value
    } else {
        SamplingStrategy::Subscript
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn suffix_array_matches_comparison_sort(codes in text_strategy(600)) {
        let text = PackedText::from_codes(&codes, 0).unwrap();
        prop_assert_eq!(build_suffix_array(&text).to_vec(), naive_suffix_array(&text));
    }

    #[test]
    fn bwt_inverts_through_lf(codes in text_strategy(600)) {
        let text = PackedText::from_codes(&codes, 0).unwrap();
        let index = FmIndex::build(&text, 2, SamplingStrategy::Value).unwrap();
        // Row 0 holds the sentinel suffix; walking LF spells the text backwards.
        let mut row = 0;
        let mut spelled = Vec::new();
        while let Some(code) = index.bwt().get(row) {
            spelled.push(code);
            row = index.lf(row).unwrap();
        }
        spelled.reverse();
        prop_assert_eq!(spelled, codes);
    }

    #[test]
    fn rank_counts_match_prefix_counts(codes in text_strategy(2000), probe in any::<prop::sample::Index>()) {
        let text = PackedText::from_codes(&codes, 0).unwrap();
        let sa = build_suffix_array(&text);
        let bwt = derive_bwt(&text, &sa);
        let index = FmIndex::build(&text, 3, SamplingStrategy::Value).unwrap();
        let l = probe.index(text.len() + 1);
        let mut expected = [0usize; 4];
        for i in 0..l {
            if let Some(c) = bwt.get(i) {
                expected[c as usize] += 1;
            }
        }
        prop_assert_eq!(index.bwt().rank_all(l), expected);
    }

    #[test]
    fn every_engine_agrees_with_both_oracles(
        codes in text_strategy(800),
        pcodes in pattern_strategy(),
        distance in 2usize..10,
        threshold in prop::sample::select(vec![0usize, 1, 4, 16, UNBOUNDED]),
        early_termination in any::<bool>(),
    ) {
        let text = PackedText::from_codes(&codes, 0).unwrap();
        let pattern = Pattern::from_codes(pcodes).unwrap();
        let expected = naive_locate(&text, &pattern);
        let sa = naive_suffix_array(&text);
        prop_assert_eq!(&suffix_sort_locate(&text, &sa, &pattern), &expected);

        for index in FmIndex::build_many(&text, &[(distance, SamplingStrategy::Value), (distance, SamplingStrategy::Subscript)]).unwrap() {
            prop_assert_eq!(index.count(&pattern), naive_count(&text, &pattern));
            let walked = index.locate(&pattern, Engine::Original).unwrap();
            prop_assert_eq!(walked.sorted_positions(), expected.clone());
        }
        let index = FmIndex::build(&text, distance, SamplingStrategy::Value).unwrap();
        let config = FmTreeConfig { threshold, early_termination, trace: true, ..FmTreeConfig::default() };
        let r = index.locate(&pattern, Engine::FmTree(config)).unwrap();
        prop_assert_eq!(r.positions.len(), expected.len());
        prop_assert_eq!(r.sorted_positions(), expected);
        for (x, m) in r.positions.iter().zip(&r.provenance) {
            prop_assert_eq!(x % distance, m.residue(distance));
        }
    }

    #[test]
    fn layers_partition_residues(
        codes in text_strategy(800),
        pcodes in pattern_strategy(),
        distance in 2usize..8,
    ) {
        let text = PackedText::from_codes(&codes, 0).unwrap();
        let pattern = Pattern::from_codes(pcodes).unwrap();
        let index = FmIndex::build(&text, distance, SamplingStrategy::Value).unwrap();
        let search = index.backward_search(&pattern);
        let expected = naive_locate(&text, &pattern);

        // Build every layer explicitly and harvest it.
        let mut found = early_leaf(&index, search.penult, pattern.first()).unwrap();
        let mut layer = if search.range.is_empty() { vec![] } else { vec![search.range] };
        for i in 0..distance - 1 {
            for &range in &layer {
                found.extend(retrieve_sampled(&index, range, i).unwrap());
            }
            layer = layer
                .iter()
                .flat_map(|&r| expand_node(&index, r))
                .filter(|r: &SaRange| !r.is_empty())
                .collect();
        }
        found.sort_unstable();
        prop_assert_eq!(found, expected);
    }

    #[test]
    fn serialization_preserves_answers(
        codes in text_strategy(3000),
        pcodes in pattern_strategy(),
        distance in 2usize..10,
        value in any::<bool>(),
    ) {
        let text = PackedText::from_codes(&codes, 7).unwrap();
        let index = FmIndex::build(&text, distance, strategy_of(value)).unwrap();
        let bytes = index.to_bytes();
        prop_assert_eq!(bytes.len() as u64, index.serialized_size());
        let restored = FmIndex::from_bytes(&bytes).unwrap();
        prop_assert_eq!(restored.to_bytes(), bytes);
        let pattern = Pattern::from_codes(pcodes).unwrap();
        prop_assert_eq!(
            restored.locate(&pattern, Engine::Original).unwrap().sorted_positions(),
            index.locate(&pattern, Engine::Original).unwrap().sorted_positions()
        );
        prop_assert_eq!(restored.metadata(), index.metadata());
    }

    #[test]
    fn normalization_is_seeded(raw in "[ACGTNacgtn]{1,200}", seed in any::<u64>()) {
        let parsed = RawText::parse(raw.as_bytes(), SourceFormat::Plain).unwrap();
        let a = normalize(&parsed, seed);
        prop_assert_eq!(&a, &normalize(&parsed, seed));
        prop_assert_eq!(a.text_len(), raw.len());
        for (i, byte) in raw.bytes().enumerate() {
            if let Some(code) = fmtree::textio::encode_base(byte) {
                prop_assert_eq!(a.code(i), code);
            }
        }
    }
}

#[test]
fn long_run_of_one_base() {
    let codes = vec![0u8; 10_000];
    let text = PackedText::from_codes(&codes, 0).unwrap();
    let index = FmIndex::build(&text, 7, SamplingStrategy::Value).unwrap();
    let pattern = Pattern::from_codes(vec![0; 50]).unwrap();
    let expected: Vec<usize> = (0..=10_000 - 50).collect();
    for threshold in [0, 16, UNBOUNDED] {
        let r = index.locate(&pattern, Engine::FmTree(FmTreeConfig::with_threshold(threshold))).unwrap();
        assert_eq!(r.sorted_positions(), expected);
    }
}

#[test]
fn early_leaf_covers_last_residue_only() {
    let text = PackedText::from_codes(&[0, 1, 2, 3, 0, 0, 1, 1, 0], 0).unwrap();
    let index = FmIndex::build(&text, 3, SamplingStrategy::Value).unwrap();
    let config = FmTreeConfig { threshold: 0, trace: true, ..FmTreeConfig::default() };
    let r = index.locate(&"a".parse().unwrap(), Engine::FmTree(config)).unwrap();
    for (x, m) in r.positions.iter().zip(&r.provenance) {
        assert_eq!(*m == Mechanism::EarlyLeaf, x % 3 == 2);
    }
}
