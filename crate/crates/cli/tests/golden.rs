//! Committed inputs and outputs. `AINF_BLESS=1` rewrites the expected files.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use ainf_cli::schema::Document;
use ainf_cli::workspace::{document, object_vectors, to_json, twisted_doc};
use ainf_core::ainf::{AInfDeformation, Structure};
use ainf_core::base::{q, BaseSpec, Coefficient, Monomial};
use ainf_core::graded::{GradingMode, VectorB};
use ainf_core::instances::*;
use ainf_core::twisted::{TwMatrix, TwistedComplex};

fn golden() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("golden")
}

fn bless() -> bool {
    std::env::var_os("AINF_BLESS").is_some()
}

fn qpow(base: &BaseSpec, n: u32) -> Coefficient {
    let c = Coefficient::monomial(Monomial::from_exponents(&[n]), q(1));
    base.check(&c).unwrap();
    c
}

/// Documents built from the shipped instances.
fn generated_inputs() -> Vec<(&'static str, Document)> {
    let mut out = Vec::new();
    out.push(("dg_four", document("dg_four", None, &dg_four(GradingMode::Z), None)));
    out.push(("massey", document("massey", None, &massey(1), None)));

    let base = BaseSpec::new(1, 4, &[]).unwrap();
    let d = central_curvature(&base);
    let shape = d.shape();
    let hom = shape.hom(0, 0);
    let mut delta = TwMatrix::new();
    delta.insert((1, 0), VectorB::unit(hom.index_of("x").unwrap()));
    delta.insert((0, 1), VectorB::single(hom.index_of("1").unwrap(), qpow(&base, 1)));
    let lvb = TwistedComplex::new("LvB", vec![(0, 0), (0, 1)], delta);
    let mut doc = document("lvb", Some(&base), d.reference(), Some(&d));
    doc.twisted = vec![twisted_doc(shape, &lvb, 1)];
    out.push(("lvb", doc));

    let base = BaseSpec::new(1, 3, &[]).unwrap();
    let d = exact_pair_deformed(&base);
    out.push(("exact_pair", document("exact_pair", Some(&base), d.reference(), Some(&d))));

    let base = BaseSpec::new(1, 4, &[]).unwrap();
    let c = massey(1);
    let hom = c.shape().hom(0, 0).clone();
    let mut products = c.products().clone();
    products.add_nullary(0, &VectorB::single(hom.index_of("w").unwrap(), qpow(&base, 2)));
    let d = AInfDeformation::new(base.clone(), c, products, 2).unwrap();
    let mut doc = document("massey_gauge", Some(&base), d.reference(), Some(&d));
    let r = BTreeMap::from([(0, VectorB::single(hom.index_of("u").unwrap(), qpow(&base, 1)))]);
    doc.uncurving = object_vectors(d.shape(), &r, 1);
    out.push(("massey_gauge", doc));
    out
}

fn input(stem: &str) -> PathBuf {
    golden().join("inputs").join(format!("{stem}.json"))
}

#[test]
fn inputs_encode_the_shipped_instances() {
    for (stem, doc) in generated_inputs() {
        let path = input(stem);
        let text = to_json(&doc);
        if bless() {
            fs::create_dir_all(path.parent().unwrap()).unwrap();
            fs::write(&path, &text).unwrap();
        }
        assert_eq!(fs::read_to_string(&path).unwrap(), text, "{stem}");
    }
}

struct Case {
    input: &'static str,
    args: &'static [&'static str],
    code: i32,
}

const CASES: &[Case] = &[
    Case { input: "minimal", args: &["verify"], code: 0 },
    Case { input: "dg_four", args: &["verify"], code: 0 },
    Case { input: "dg_four", args: &["minimal-model"], code: 0 },
    Case { input: "massey", args: &["verify", "--a-max", "5"], code: 0 },
    Case { input: "massey", args: &["minimal-model", "--k-max", "5"], code: 0 },
    Case { input: "lvb", args: &["verify"], code: 0 },
    Case { input: "lvb", args: &["tw-curvature"], code: 0 },
    Case { input: "lvb", args: &["uncurve-object"], code: 0 },
    Case { input: "lvb", args: &["deformed-minimal-model", "--trace"], code: 0 },
    Case { input: "exact_pair", args: &["verify"], code: 0 },
    Case { input: "exact_pair", args: &["check-d-zero"], code: 0 },
    Case { input: "exact_pair", args: &["cohomology-compare"], code: 0 },
    Case { input: "exact_pair", args: &["hochschild-mc"], code: 0 },
    Case { input: "exact_pair", args: &["deformed-minimal-model"], code: 0 },
    Case { input: "massey_gauge", args: &["gauge"], code: 0 },
    Case { input: "massey_gauge", args: &["hochschild-mc"], code: 0 },
    Case { input: "massey_curved", args: &["verify"], code: 0 },
    Case { input: "massey_curved", args: &["optimize-curvature"], code: 0 },
    Case { input: "massey_curved", args: &["deformed-minimal-model", "--trace"], code: 0 },
    Case { input: "massey_curved", args: &["uncurve-object"], code: 0 },
    Case { input: "massey_curved", args: &["hochschild-mc"], code: 0 },
];

fn files(dir: &Path) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    for e in fs::read_dir(dir).unwrap() {
        let e = e.unwrap();
        out.insert(e.file_name().to_string_lossy().into_owned(), fs::read_to_string(e.path()).unwrap());
    }
    out
}

fn case_id(c: &Case) -> String {
    format!("{}.{}", c.input, c.args.join("_").replace("--", ""))
}

#[test]
fn outputs_match_committed_files() {
    for c in CASES {
        let tmp = tempfile::tempdir().unwrap();
        let out = Command::new(env!("CARGO_BIN_EXE_ainf"))
            .args(c.args)
            .arg(input(c.input))
            .arg("--out")
            .arg(tmp.path())
            .env_remove(ainf_cli::OUT_DIR_ENV)
            .output()
            .unwrap();
        let id = case_id(c);
        assert_eq!(out.status.code(), Some(c.code), "{id}: {}", String::from_utf8_lossy(&out.stderr));
        let mut produced = files(tmp.path());
        produced.insert("stdout".into(), String::from_utf8(out.stdout).unwrap());
        let expected_dir = golden().join("expected").join(&id);
        if bless() {
            let _ = fs::remove_dir_all(&expected_dir);
            fs::create_dir_all(&expected_dir).unwrap();
            for (name, text) in &produced {
                fs::write(expected_dir.join(name), text).unwrap();
            }
        }
        let expected = files(&expected_dir);
        assert_eq!(produced.keys().collect::<Vec<_>>(), expected.keys().collect::<Vec<_>>(), "{id}");
        for (name, text) in &produced {
            assert_eq!(text, &expected[name], "{id}/{name}");
        }
    }
}

#[test]
fn curved_example_is_the_gauged_one() {
    let tmp = tempfile::tempdir().unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_ainf"))
        .args(["gauge"])
        .arg(input("massey_gauge"))
        .arg("--out")
        .arg(tmp.path())
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(0));
    let mut doc: Document = serde_json::from_str(&fs::read_to_string(tmp.path().join("massey_gauge-gauged.json")).unwrap()).unwrap();
    doc.name = Some("massey_curved".into());
    let text = to_json(&doc);
    if bless() {
        fs::write(input("massey_curved"), &text).unwrap();
    }
    assert_eq!(fs::read_to_string(input("massey_curved")).unwrap(), text);
}
