//! Exercises the C ABI through its Rust symbols, plus a C compile check of the
//! generated header.

use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use textbench_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(tb_last_error()).to_string_lossy().into_owned() }
}

fn take_string(p: *mut std::ffi::c_char) -> String {
    let s = unsafe { CStr::from_ptr(p).to_string_lossy().into_owned() };
    unsafe { tb_string_free(p) };
    s
}

#[test]
fn preprocess_and_errors() {
    let code = CString::new("1111").unwrap();
    let text = CString::new("Kitaplardan ve romanı okudum.").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { tb_preprocess(code.as_ptr(), text.as_ptr(), &mut out) }, TbStatus::Ok);
    assert_eq!(take_string(out), "kitap roman okud");
    assert_eq!(last_error(), "");

    let bad = CString::new("12").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { tb_preprocess(bad.as_ptr(), text.as_ptr(), &mut out) }, TbStatus::Config);
    assert!(out.is_null());
    assert!(last_error().contains("invalid preprocessing code"));
    assert_eq!(unsafe { tb_preprocess(ptr::null(), text.as_ptr(), &mut out) }, TbStatus::NullPointer);
    let invalid = [0xffu8, 0xfe, 0];
    assert_eq!(unsafe { tb_preprocess(code.as_ptr(), invalid.as_ptr() as *const _, &mut out) }, TbStatus::InvalidUtf8);
}

#[test]
fn corpus_embedding_model_round_trip() {
    unsafe {
        let mut corpus = ptr::null_mut();
        assert_eq!(tb_corpus_synth(160, 4, 7, false, &mut corpus), TbStatus::Ok);
        assert_eq!(tb_corpus_len(corpus), 160);
        assert_eq!(tb_corpus_label_count(corpus), 4);

        let code = CString::new("1111").unwrap();
        let mut emb = ptr::null_mut();
        assert_eq!(tb_embedding_fit(corpus, code.as_ptr(), TbEmbeddingKind::Tfidf, 1, &mut emb), TbStatus::Ok);
        let dim = tb_embedding_dim(emb);
        assert!(dim > 10);

        let text = CString::new("bir iki üç").unwrap();
        let mut buf = vec![0.0; dim];
        assert_eq!(tb_embedding_transform(emb, text.as_ptr(), buf.as_mut_ptr(), dim), TbStatus::Ok);
        assert_eq!(tb_embedding_transform(emb, text.as_ptr(), buf.as_mut_ptr(), dim - 1), TbStatus::InvalidArgument);

        let mut model = ptr::null_mut();
        assert_eq!(tb_model_fit(emb, corpus, TbModelKind::Nb, 3, &mut model), TbStatus::Ok);
        let mut label = ptr::null_mut();
        assert_eq!(tb_model_predict(model, emb, text.as_ptr(), &mut label), TbStatus::Ok);
        assert!(!take_string(label).is_empty());

        tb_model_free(model);
        tb_embedding_free(emb);
        tb_corpus_free(corpus);
        // Null handles are tolerated by free and size queries.
        tb_corpus_free(ptr::null_mut());
        assert_eq!(tb_corpus_len(ptr::null()), 0);
    }
}

#[test]
fn synth_rejects_bad_sizes() {
    let mut corpus = ptr::null_mut();
    assert_eq!(unsafe { tb_corpus_synth(3, 8, 0, true, &mut corpus) }, TbStatus::Config);
    assert!(corpus.is_null());
}

#[test]
fn metrics_from_counts() {
    let counts = [2u64, 1, 1, 1];
    let mut m = TbMetrics::default();
    assert_eq!(unsafe { tb_metrics(counts.as_ptr(), 2, TbAveraging::Weighted, &mut m) }, TbStatus::Ok);
    assert!((m.accuracy - 0.6).abs() < 1e-15);
    assert!((m.recall - 0.6).abs() < 1e-15);
    assert_eq!(unsafe { tb_metrics(counts.as_ptr(), 0, TbAveraging::Macro, &mut m) }, TbStatus::InvalidArgument);
}

#[test]
fn grid_run_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = CString::new(
        "[corpus.synth]\nn_docs = 96\nn_labels = 3\nmorphology = false\n[preprocess]\ncodes = [\"1111\"]\n\
         [embeddings]\nenabled = [\"tfidf\"]\n[models]\nenabled = [\"nb\", \"dt\"]\n",
    )
    .unwrap();
    let out = CString::new(dir.path().to_str().unwrap()).unwrap();
    let mut cells = 0usize;
    assert_eq!(unsafe { tb_run_grid(cfg.as_ptr(), out.as_ptr(), &mut cells) }, TbStatus::Ok, "{}", last_error());
    assert_eq!(cells, 2);
    assert!(dir.path().join("summary.md").exists());
    let bad = CString::new("[run]\nnope = 1").unwrap();
    assert_eq!(unsafe { tb_run_grid(bad.as_ptr(), out.as_ptr(), ptr::null_mut()) }, TbStatus::Config);
}

#[test]
fn version_is_nonempty() {
    let v = unsafe { CStr::from_ptr(tb_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

/// The generated header must compile as C and as C++ when a compiler exists.
#[test]
fn header_compiles() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/textbench.h");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use_header.c");
    std::fs::write(
        &src,
        format!(
            "#include \"{header}\"\nint main(void) {{ TbCorpus *c = 0; TbStatus s = tb_corpus_synth(16, 2, 1, true, &c);\n\
             tb_corpus_free(c); return s == TB_STATUS_OK ? 0 : 1; }}\n"
        ),
    )
    .unwrap();
    for (compiler, args) in
        [("cc", vec!["-std=c99", "-Wall", "-Werror", "-fsyntax-only"]), ("c++", vec!["-x", "c++", "-fsyntax-only"])]
    {
        match Command::new(compiler).args(&args).arg(&src).output() {
            Ok(o) => assert!(o.status.success(), "{compiler}: {}", String::from_utf8_lossy(&o.stderr)),
            Err(_) => eprintln!("{compiler} not found; skipping header check"),
        }
    }
}
