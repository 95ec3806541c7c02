use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn quasilin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_quasilin"));
    cmd.env_remove("QUASILIN_OUT");
    cmd
}

fn run(dir: &Path, config: &str, args: &[&str]) -> Output {
    let path = dir.join("config.toml");
    fs::write(&path, config).unwrap();
    quasilin().args(args).arg("--config").arg(&path).arg("--quiet").output().unwrap()
}

fn summary(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

const BRATU: &str = r#"
[problem]
p = 2.0
lambda = 1.0
domain = { kind = "interval", a = 0.0, b = 1.0 }
n = 201
pair = "ex5"
"#;

#[test]
fn branch_locates_the_bratu_turning_point() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let res = run(dir.path(), BRATU, &["branch", "--out", out.to_str().unwrap()]);
    assert!(res.status.success(), "{}", stderr(&res));
    let lambda_star = summary(&out)["lambda_star"].as_f64().unwrap();
    assert!((3.512..=3.516).contains(&lambda_star), "{lambda_star}");
    let branch = fs::read_to_string(out.join("branch.csv")).unwrap();
    assert!(branch.starts_with("lambda,status,sup_norm,w1p_seminorm,iterations\n"));
}

#[test]
fn exponents_report_bounded_case() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let config = "[[exponents]]\nm = 2.0\np = 2.0\nN = 3\n";
    let res = run(dir.path(), config, &["exponents", "--out", out.to_str().unwrap()]);
    assert!(res.status.success(), "{}", stderr(&res));
    assert_eq!(summary(&out)["reports"][0]["case"], "Linfinity");
}

#[test]
fn zero_lambda_gives_zero_field() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let config = BRATU.replace("lambda = 1.0", "lambda = 0.0");
    let res = run(dir.path(), &config, &["solve", "--out", out.to_str().unwrap()]);
    assert!(res.status.success(), "{}", stderr(&res));
    let field = fs::read_to_string(out.join("field.csv")).unwrap();
    for line in field.lines().skip(1) {
        let v: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert_eq!(v, 0.0, "{line}");
    }
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let res = quasilin().arg("frobnicate").output().unwrap();
    assert_eq!(res.status.code(), Some(64));
}

#[test]
fn unknown_key_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let config = BRATU.replace("n = 201", "n = 201\nlambda_max2 = 4.0");
    let res = run(dir.path(), &config, &["solve"]);
    assert_eq!(res.status.code(), Some(2));
    assert!(stderr(&res).contains("lambda_max2"), "{}", stderr(&res));
}

#[test]
fn missing_weight_table_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let config = format!("{BRATU}weight = {{ csv = \"absent.csv\" }}\n");
    let res = run(dir.path(), &config, &["solve"]);
    assert_eq!(res.status.code(), Some(2));
    assert!(stderr(&res).contains("absent.csv"), "{}", stderr(&res));
}

#[test]
fn minimal_config_uses_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let config = "[problem]\np = 2.0\nlambda = 1.0\ndomain = { kind = \"interval\", a = 0.0, b = 1.0 }\n";
    let res = run(dir.path(), config, &["solve", "--out", out.to_str().unwrap()]);
    assert!(res.status.success(), "{}", stderr(&res));
    let field = fs::read_to_string(out.join("field.csv")).unwrap();
    assert_eq!(field.lines().count(), 202);
}

#[test]
fn runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config = "seed = 7\n[problem]\np = 2.0\nlambda = { lambda1_factor = 0.5 }\n\
                  domain = { kind = \"interval\", a = 0.0, b = 1.0 }\nprobe_starts = 3\n";
    let mut texts = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("out{k}"));
        let res = run(dir.path(), config, &["solve", "--out", out.to_str().unwrap()]);
        assert!(res.status.success(), "{}", stderr(&res));
        texts.push((
            fs::read(out.join("field.csv")).unwrap(),
            fs::read(out.join("uniqueness.json")).unwrap(),
        ));
    }
    assert_eq!(texts[0], texts[1]);
}

#[test]
fn environment_output_directory_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("from_env");
    let path = dir.path().join("config.toml");
    fs::write(&path, BRATU).unwrap();
    let res = quasilin()
        .env("QUASILIN_OUT", &out)
        .args(["solve", "--quiet", "--config"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(res.status.success(), "{}", stderr(&res));
    assert!(out.join("summary.json").is_file());
}

#[test]
fn flag_overrides_environment() {
    let dir = tempfile::tempdir().unwrap();
    let env_out = dir.path().join("env");
    let flag_out = dir.path().join("flag");
    let path = dir.path().join("config.toml");
    fs::write(&path, BRATU).unwrap();
    let res = quasilin()
        .env("QUASILIN_OUT", &env_out)
        .args(["solve", "--quiet", "--config"])
        .arg(&path)
        .arg("--out")
        .arg(&flag_out)
        .output()
        .unwrap();
    assert!(res.status.success(), "{}", stderr(&res));
    assert!(flag_out.join("summary.json").is_file());
    assert!(!env_out.exists());
}
