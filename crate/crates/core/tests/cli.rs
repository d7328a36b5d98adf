use resonance::cli::run;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("resonance").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn nls_json() -> String {
    let p = std::env::temp_dir().join(format!("resonance-nls-{}.json", std::process::id()));
    std::fs::write(&p, r#"{"P_t1":"-k^2","P_t2":"k^2","nabla_alpha":"1","alpha":0,"nonlinearity":[1,0,0]}"#).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn trees_of_order_two() {
    let eq = nls_json();
    let (code, out, _) = call(&["trees", "--eq", &eq, "--order", "2"]);
    assert_eq!(code, 0);
    let heads: Vec<_> = out.lines().filter(|l| l.starts_with('T')).collect();
    assert_eq!(heads.len(), 4);
    assert!(heads[3].starts_with("T3  S = 4  Upsilon = 4"), "{}", heads[3]);
    let (_, js, _) = call(&["trees", "--eq", &eq, "--order", "2", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&js).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 4);
}

#[test]
fn nested_scheme_is_minus_half_t_squared() {
    let eq = nls_json();
    let (code, out, _) = call(&["scheme", "--eq", &eq, "--order", "2", "--n", "2", "--tree", "fixture:nested_core"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "-1/2 * t^2");
    // same tree, as listed by `trees`
    let (_, out, _) = call(&["scheme", "--eq", &eq, "--order", "2", "--n", "2", "--tree", "T2"]);
    assert_eq!(out.trim(), "-1/2 * t^2");
    // the conjugated nested tree picks up the opposite sign
    let (_, out, _) = call(&["scheme", "--eq", &eq, "--order", "2", "--n", "2", "--tree", "T3"]);
    assert_eq!(out.trim(), "1/2 * t^2");
}

#[test]
fn validation_errors_exit_one() {
    assert_eq!(call(&["scheme", "--tree", "T9", "--order", "2"]).0, 1);
    assert_eq!(call(&["scheme", "--tree", "fixture:nested_core", "--order", "1"]).0, 1);
    assert_eq!(call(&["nosuch"]).0, 1);
    assert_eq!(call(&["trees", "--eq", "/nonexistent/eq.json"]).0, 1);
    let bad = std::env::temp_dir().join("resonance-bad.json");
    std::fs::write(&bad, "{\"P_t1\": 3}").unwrap();
    assert_eq!(call(&["trees", "--eq", bad.to_str().unwrap()]).0, 1);
    assert_eq!(call(&["split", "--tree", "T2", "--m", "1"]).0, 1);
}

#[test]
fn output_is_deterministic_and_can_go_to_a_file() {
    let a = call(&["oracle", "--tree", "T1", "--r", "1", "--seed", "3"]);
    let b = call(&["oracle", "--tree", "T1", "--r", "1", "--seed", "3"]);
    assert_eq!(a, b);
    assert!(a.1.starts_with("step,err,slope_running"));
    let p = std::env::temp_dir().join(format!("resonance-out-{}.txt", std::process::id()));
    let (code, out, _) = call(&["coproduct", "--tree", "T2", "--out", p.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    assert_eq!(std::fs::read_to_string(&p).unwrap(), call(&["coproduct", "--tree", "T2"]).1);
}

#[test]
fn algebra_commands() {
    let (_, out, _) = call(&["arborify", "--tree", "fixture:nested_core"]);
    assert_eq!(out.lines().count(), 1);
    let (_, out, _) = call(&["coproduct", "--tree", "fixture:nested_core", "--reduced"]);
    assert_eq!(out.lines().count(), 2);
    let (code, out, _) = call(&["split", "--tree", "fixture:nested_core", "--n", "2", "--r", "0", "--m", "0,1", "--json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v[0]["prefixes"].as_array().unwrap().len(), 2);
    let (code, out, _) = call(&["error-terms", "--tree", "T1", "--order", "2"]);
    assert_eq!(code, 0);
    assert!(out.contains("required regularity 2"));
}

#[test]
fn quick_check_passes() {
    let (code, out, _) = call(&["check", "--quick"]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(out.lines().filter(|l| l.starts_with("PASS")).count(), 6);
}

#[test]
fn nls_run_with_config_file() {
    let p = std::env::temp_dir().join(format!("resonance-cfg-{}.json", std::process::id()));
    let cfg = r#"{"r":1,"n":2,"modes":8,"data":{"kind":"smooth","amplitude":0.2},"seed":1,"t_final":0.0625,"taus":[0.0625,0.03125,0.015625,0.0078125]}"#;
    std::fs::write(&p, cfg).unwrap();
    let (code, out, err) = call(&["nls-run", "--config", p.to_str().unwrap(), "--global"]);
    assert_eq!(code, 0, "{err}");
    assert!(out.starts_with("tau,local_err_L2,local_err_H1,global_err_L2,slope_running"));
    assert!(out.contains("# global order"));
    std::fs::write(&p, r#"{"r":1,"n":2,"modes":8,"data":{"kind":"zero"},"t_final":1.0,"taus":[0.1,0.05]}"#).unwrap();
    assert_eq!(call(&["nls-run", "--config", p.to_str().unwrap()]).0, 1);
}
