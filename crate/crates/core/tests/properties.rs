use idiomforge_core::annotation::{cohens_kappa, AnnotationRecord, Label};
use idiomforge_core::augment::{
    augment_embedding, augment_spelling, augment_tfidf, EmbeddingTable, SpellingDictionary, TfidfMode, TfidfStats,
};
use idiomforge_core::corpus::{segment_sentences, Document};
use idiomforge_core::enrich::{attach_glosses, render_local, ContextMode, LocalContext};
use idiomforge_core::lexicon::{GlossStore, Lexicon, NounCompoundEntry};
use idiomforge_core::sts::{build_eval_records, similarity, spearman_rho, SentenceEmbedding, Scorer};
use idiomforge_core::tiering::{cosine, count_vector, cut_tier, structural_filter, FilterConfig, RankedEntry, ReferenceProfiles};
use idiomforge_core::triplet::{generate_bronze, Triplet};
use idiomforge_core::corpus::link_neighbors;
use proptest::prelude::*;

const VOCAB: &[&str] = &[
    "the", "a", "man", "test", "subject", "hard", "work", "was", "Mr", "Dr", "ran", "home", "it", "rained", "Yes",
    "Really", "J", "guinea", "pig", "we", "left",
];
const PUNCT: &[&str] = &["", "", "", ".", "!", "?", "?!", ",", "..."];

fn body() -> impl Strategy<Value = String> {
    prop::collection::vec((prop::sample::select(VOCAB), prop::sample::select(PUNCT), prop::sample::select(&[" ", "  ", "\n", "\t "][..])), 1..40)
        .prop_map(|parts| parts.into_iter().map(|(w, p, s)| format!("{w}{p}{s}")).collect())
}

fn lexicon() -> Lexicon {
    Lexicon::new([
        NounCompoundEntry::new("guinea pig", vec!["test subject".into()], vec!["animal".into()]).unwrap(),
        NounCompoundEntry::new("elbow grease", vec!["hard work".into(), "work".into()], vec!["joint lubricant".into()]).unwrap(),
    ])
    .unwrap()
}

/// Naive occurrence check: lowercase both sides and test every byte offset.
fn brute_force_matches(text: &str, entry: &NounCompoundEntry) -> bool {
    let lower = text.to_lowercase();
    let is_word = |c: Option<char>| c.is_some_and(char::is_alphanumeric);
    entry.figurative_synonyms.iter().any(|syn| {
        (0..=lower.len().saturating_sub(syn.len())).any(|i| {
            lower.is_char_boundary(i)
                && lower[i..].starts_with(syn.as_str())
                && !is_word(lower[..i].chars().next_back())
                && !is_word(lower[i + syn.len()..].chars().next())
        })
    })
}

fn sentence_text() -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(VOCAB), 1..15).prop_map(|w| w.join(" ") + ".")
}

proptest! {
    #[test]
    fn segmentation_preserves_words(body in body()) {
        let doc = Document::new("d", "t", body.clone());
        let sentences = segment_sentences(&doc).unwrap();
        let joined: Vec<&str> = sentences.iter().flat_map(|s| s.text.split(' ')).collect();
        let original: Vec<&str> = body.split_whitespace().collect();
        prop_assert_eq!(joined, original);
        for (i, s) in sentences.iter().enumerate() {
            prop_assert_eq!(s.index, i);
            prop_assert!(!s.text.contains('\n') && s.text.trim() == s.text);
            prop_assert_eq!(s.prev.as_deref(), i.checked_sub(1).map(|p| sentences[p].text.as_str()));
            prop_assert_eq!(s.next.as_deref(), sentences.get(i + 1).map(|n| n.text.as_str()));
        }
        prop_assert_eq!(&sentences, &segment_sentences(&doc).unwrap());
    }

    #[test]
    fn bronze_matches_brute_force_and_round_trips(texts in prop::collection::vec(sentence_text(), 1..12)) {
        let lex = lexicon();
        let refs: Vec<&str> = texts.iter().map(String::as_str).collect();
        let sentences = link_neighbors("doc", &refs);
        let triplets: Vec<Triplet> = generate_bronze(sentences.clone(), &lex).collect();
        let expected: usize = sentences
            .iter()
            .map(|s| lex.entries().iter().filter(|e| brute_force_matches(&s.text, e)).count())
            .sum();
        prop_assert_eq!(triplets.len(), expected);
        for t in &triplets {
            prop_assert!(t.is_consistent());
            let synonym = &t.e_c[t.e_c_span()];
            let rebuilt = format!("{}{}{}", t.prefix(), synonym, t.suffix());
            prop_assert_eq!(&rebuilt, &t.e_c);
            let literal = &t.e_i[t.e_i_span()];
            prop_assert_eq!(literal.to_lowercase(), lex.get(&t.mwe).unwrap().literal());
        }
        for w in triplets.windows(2) {
            prop_assert!(w[0].cmp_source(&w[1]).is_lt());
        }
    }

    #[test]
    fn cosine_properties(a in sentence_text(), b in sentence_text(), c in 1u64..10) {
        let (va, vb) = (count_vector(&a), count_vector(&b));
        let ab = cosine(&va, &vb);
        prop_assert_eq!(ab, cosine(&vb, &va));
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert!((cosine(&va, &va.scale(c)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tiers_nest_and_filter_commutes(scores in prop::collection::vec(0u8..20, 1..120), p1 in 1u32..100, dp in 1u32..50) {
        let entries: Vec<RankedEntry> = scores
            .iter()
            .enumerate()
            .map(|(i, &s)| {
                let e = if i % 3 == 0 { "a guinea pig".to_string() } else { format!("he saw a guinea pig number {i} today") };
                let start = e.find("guinea pig").unwrap();
                RankedEntry {
                    triplet: Triplet {
                        mwe: "guinea pig".into(), e: e.clone(), e_c: e.clone(), e_i: e,
                        span_start: start, span_end: start + 10,
                        doc_id: format!("d{}", i % 4), index: i, prev: None, next: None, augmentation: None,
                    },
                    score: f64::from(s) / 20.0,
                    reference_mwe: "guinea pig".into(),
                }
            })
            .collect();
        let p2 = (p1 + dp).min(100);
        let small = cut_tier(entries.clone(), f64::from(p1)).unwrap();
        let large = cut_tier(entries.clone(), f64::from(p2)).unwrap();
        prop_assert!(small.len() <= large.len());
        prop_assert_eq!(&large[..small.len()], &small[..]);

        let cfg = FilterConfig::default();
        let keep = |r: &RankedEntry| structural_filter(&r.triplet, &cfg);
        let filter_then_rank: Vec<_> = cut_tier(entries.iter().filter(|r| keep(r)).cloned().collect(), 100.0).unwrap();
        let rank_then_filter: Vec<_> = cut_tier(entries.clone(), 100.0).unwrap().into_iter().filter(keep).collect();
        prop_assert_eq!(filter_then_rank, rank_then_filter);
    }

    #[test]
    fn gloss_lists_are_prefixes(n in 0usize..8, count in 0usize..10) {
        let mut store = GlossStore::new();
        store.insert("pig", (0..count).map(|i| format!("g{i}")));
        let shorter = store.glosses_for("pig", n);
        let longer = store.glosses_for("pig", n + 1);
        prop_assert!(longer.starts_with(shorter));
        let a = attach_glosses("x", "guinea pig", &store, n);
        let b = attach_glosses("x", "guinea pig", &store, n + 1);
        prop_assert!(b.attachments.starts_with(&a.attachments));
    }

    #[test]
    fn kappa_never_exceeds_one(pairs in prop::collection::vec((any::<bool>(), any::<bool>()), 1..60)) {
        let label = |b| if b { Label::Accept } else { Label::Reject };
        let recs: Vec<AnnotationRecord> = pairs
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| AnnotationRecord {
                triplet_id: i.to_string(),
                annotator_a: label(a),
                annotator_b: label(b),
                adjudicator: (a != b).then_some(Label::Accept),
            })
            .collect();
        if let Ok(k) = cohens_kappa(&recs) {
            prop_assert!(k <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn paragraph_render_contains_base(t in sentence_text(), p in prop::option::of(sentence_text()), n in prop::option::of(sentence_text())) {
        let ctx = LocalContext::new(&t, p.as_deref(), n.as_deref());
        prop_assert_eq!(render_local(&ctx, ContextMode::Sentence), t.clone());
        prop_assert!(render_local(&ctx, ContextMode::Paragraph).contains(&t));
    }

    #[test]
    fn augmenters_protect_span_and_are_deterministic(
        before in prop::collection::vec(prop::sample::select(VOCAB), 0..8),
        after in prop::collection::vec(prop::sample::select(VOCAB), 0..8),
        seed in any::<u64>(),
        k in 1usize..3,
    ) {
        let prefix = if before.is_empty() { String::new() } else { before.join(" ") + " " };
        let suffix = if after.is_empty() { ".".to_string() } else { format!(" {}.", after.join(" ")) };
        let t = Triplet {
            mwe: "guinea pig".into(),
            e: format!("{prefix}guinea pig{suffix}"),
            e_c: format!("{prefix}test subject{suffix}"),
            e_i: format!("{prefix}animal{suffix}"),
            span_start: prefix.len(),
            span_end: prefix.len() + 10,
            doc_id: "d".into(), index: 0, prev: None, next: None, augmentation: None,
        };
        let mut dict = SpellingDictionary::new();
        for w in VOCAB { dict.insert(w, [format!("{}x", w.to_lowercase())]); }
        let table = EmbeddingTable::new(VOCAB.iter().enumerate().map(|(i, w)| (w.to_string(), vec![i as f64 + 1.0, (i % 3) as f64]))).unwrap();
        let stats = TfidfStats::fit(["the man ran home", "a test subject", "we left"]);
        let outs = [
            augment_spelling(&t, &dict, 0.5, seed),
            augment_embedding(&t, &table, 0.5, seed),
            augment_tfidf(&t, &stats, TfidfMode::Insert, k, seed),
            augment_tfidf(&t, &stats, TfidfMode::Replace, k, seed),
        ];
        let again = [
            augment_spelling(&t, &dict, 0.5, seed),
            augment_embedding(&t, &table, 0.5, seed),
            augment_tfidf(&t, &stats, TfidfMode::Insert, k, seed),
            augment_tfidf(&t, &stats, TfidfMode::Replace, k, seed),
        ];
        for (out, rerun) in outs.iter().zip(&again) {
            prop_assert_eq!(out, rerun);
            if let Ok(o) = out {
                prop_assert!(o.is_consistent());
                prop_assert_eq!(&o.e[o.span()], "guinea pig");
                prop_assert_eq!(&o.e_c[o.e_c_span()], "test subject");
                prop_assert_eq!(&o.e_i[o.e_i_span()], "animal");
            }
        }
    }

    #[test]
    fn spearman_is_rank_invariant(xs in prop::collection::vec(-5.0f64..5.0, 2..40), ys in prop::collection::vec(-5.0f64..5.0, 40)) {
        let ys = &ys[..xs.len()];
        if let Ok(rho) = spearman_rho(&xs, ys) {
            let cubic: Vec<f64> = xs.iter().map(|x| x * x * x + x).collect();
            prop_assert!((spearman_rho(&cubic, ys).unwrap() - rho).abs() < 1e-9);
        }
    }

    #[test]
    fn similarity_symmetric_and_scale_invariant(a in prop::collection::vec(-3.0f64..3.0, 6), b in prop::collection::vec(-3.0f64..3.0, 6), c in 0.01f64..100.0) {
        let (ea, eb) = (SentenceEmbedding::new(a).unwrap(), SentenceEmbedding::new(b).unwrap());
        if let Ok(s) = similarity(&ea, &eb) {
            prop_assert_eq!(s, similarity(&eb, &ea).unwrap());
            prop_assert!((similarity(&ea.scaled(c).unwrap(), &eb).unwrap() - s).abs() < 1e-12);
        }
    }
}

struct LengthScorer;
impl Scorer for LengthScorer {
    fn score(&self, a: &str, b: &str) -> idiomforge_core::Result<f64> {
        Ok(1.0 / (1.0 + (a.len() as f64 - b.len() as f64).abs()))
    }
}

#[test]
fn eval_records_double_the_input() {
    let lex = lexicon();
    let texts = ["He was a test subject.", "Hard work pays.", "Nothing."];
    let triplets: Vec<Triplet> = generate_bronze(link_neighbors("d", &texts), &lex).collect();
    let records = build_eval_records(&triplets, &LengthScorer).unwrap();
    assert_eq!(records.len(), 2 * triplets.len());
    for (t, pair) in triplets.iter().zip(records.chunks(2)) {
        assert_eq!(pair[0].gold_sim, 1.0);
        assert_eq!(pair[1].gold_sim.to_bits(), LengthScorer.score(&t.e_c, &t.e_i).unwrap().to_bits());
    }
}

#[test]
fn reference_profiles_sum_sentences() {
    let mut refs = ReferenceProfiles::new();
    refs.add_sentence("guinea pig", "a b");
    refs.add_sentence("guinea pig", "b c");
    let p = refs.profile("guinea pig").unwrap();
    assert_eq!((p.get("a"), p.get("b"), p.get("c")), (1, 2, 1));
}
