use serde_json::Value;
use ttperm::cli::run;

fn call(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let mut argv = vec!["ttperm"];
    argv.extend_from_slice(args);
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn roundtrip(args: &[&str]) {
    let (code, out, err) = call(args);
    assert_eq!(code, 0, "{args:?}: {err}");
    let path = std::env::temp_dir().join(format!("ttperm-cli-{}-{}.json", args[0], std::process::id()));
    std::fs::write(&path, &out).unwrap();
    let (code, out, err) = call(&["verify", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(code, 0, "verify {args:?}: {out} {err}");
}

#[test]
fn certificates_verify() {
    roundtrip(&["kos", "--group", "C4", "--subgroup", "C2", "--verify"]);
    roundtrip(&["invert", "--group", "C3"]);
    roundtrip(&["twisted", "--group", "C2", "--ring", "F2", "--max-twist", "2"]);
    roundtrip(&["spectrum", "--group", "C6"]);
}

#[test]
fn dot_output() {
    let (code, out, _) = call(&["spectrum", "--group", "C4", "--format", "dot"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("digraph"));
}

#[test]
fn tampered_certificate_fails() {
    let (_, out, _) = call(&["invert", "--group", "C2"]);
    let mut v: Value = serde_json::from_str(&out).unwrap();
    // 3·f is still an equivariant chain map, but no longer an equivalence
    for comp in v["equivalence"]["f"]["comps"].as_object_mut().unwrap().values_mut() {
        for row in comp["entries"].as_array_mut().unwrap() {
            for x in row.as_array_mut().unwrap() {
                *x = Value::from(x.as_i64().unwrap() * 3);
            }
        }
    }
    let path = std::env::temp_dir().join(format!("ttperm-tampered-{}.json", std::process::id()));
    std::fs::write(&path, v.to_string()).unwrap();
    let (code, _, _) = call(&["verify", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(code, 2);
}

#[test]
fn usage_errors() {
    assert_eq!(call(&["frobnicate"]).0, 1);
    assert_eq!(call(&["kos", "--group", "C4", "--subgroup", "C3"]).0, 1);
}
