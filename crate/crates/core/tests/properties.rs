//! Property tests for invariants that hold for arbitrary inputs.

use proptest::prelude::*;

use textbench::corpus::CategoryLabel;
use textbench::evaluate::{accuracy, metrics, Averaging, ConfusionMatrix};
use textbench::preprocess::{apply_pipeline, enumerate_configs, PipelineResources, TokenStream};
use textbench::vectorize::{OneHotModel, TfidfModel};

fn words() -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec("[a-eçğıöşü]{1,6}", 1..12)
}

proptest! {
    #[test]
    fn pipeline_is_idempotent_on_its_output(text in "[A-Za-zÇĞİÖŞÜçğıöşü0-9 .,!]{0,60}") {
        let res = PipelineResources::bundled();
        for code in enumerate_configs() {
            if code.stem {
                continue; // stemming a stem may shorten it further
            }
            let once = apply_pipeline(&text, code, &res).unwrap();
            let twice = apply_pipeline(&once.tokens().join(" "), code, &res).unwrap();
            prop_assert_eq!(once, twice);
        }
    }

    #[test]
    fn pipeline_never_emits_empty_tokens(text in "\\PC{0,80}") {
        let res = PipelineResources::bundled();
        for code in enumerate_configs() {
            let out = apply_pipeline(&text, code, &res).unwrap();
            prop_assert!(out.iter().all(|t| !t.is_empty()));
        }
    }

    #[test]
    fn tfidf_and_onehot_shapes(docs in prop::collection::vec(words(), 1..8)) {
        let docs: Vec<TokenStream> = docs.into_iter().map(TokenStream::new).collect();
        let tfidf = TfidfModel::fit(&docs, 1).unwrap();
        let onehot = OneHotModel::fit(&docs, 1).unwrap();
        prop_assert_eq!(tfidf.dim(), onehot.dim());
        for d in &docs {
            let t = tfidf.transform(d);
            let o = onehot.transform(d);
            prop_assert!(t.entries().iter().all(|&(_, w)| w >= 0.0 && w.is_finite()));
            prop_assert!(o.entries().iter().all(|&(_, w)| w == 1.0));
            // Every present token is an index of the one-hot vector.
            prop_assert!(t.indices().all(|i| o.get(i) == 1.0));
        }
    }

    #[test]
    fn metrics_stay_in_unit_interval(counts in prop::collection::vec(prop::collection::vec(0u64..50, 3), 3)) {
        let labels: Vec<CategoryLabel> = ["a", "b", "c"].iter().map(|s| CategoryLabel::new(*s)).collect();
        prop_assume!(counts.iter().flatten().sum::<u64>() > 0);
        let cm = ConfusionMatrix::from_counts(labels, counts).unwrap();
        let acc = accuracy(&cm);
        for avg in [Averaging::Macro, Averaging::Weighted] {
            let r = metrics(&cm, avg);
            for v in [r.accuracy, r.precision, r.recall, r.f1] {
                prop_assert!((0.0..=1.0).contains(&v));
            }
        }
        prop_assert!((metrics(&cm, Averaging::Weighted).recall - acc).abs() < 1e-12);
    }
}
