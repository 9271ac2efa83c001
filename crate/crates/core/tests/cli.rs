use std::path::Path;
use std::process::{Command, Output};

fn pickwedge(args: &[&str], out_dir: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_pickwedge"));
    cmd.args(args).env_remove("PICKWEDGE_OUT_DIR");
    if let Some(dir) = out_dir {
        cmd.env("PICKWEDGE_OUT_DIR", dir);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data_rows(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn vandermonde_sweep_holds_with_node_count_indexing() {
    let o = pickwedge(&["vandermonde", "--max-degree", "15"], None);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows = data_rows(&text);
    assert_eq!(rows[0], "degree,inverse_inf_norm,bound_k,bound_k_plus_1,holds_k,holds_k_plus_1");
    assert_eq!(rows.len(), 17);
    for (k, row) in rows[1..].iter().enumerate() {
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells[0], k.to_string());
        assert_eq!(cells[5], "true", "{row}");
    }
}

#[test]
fn linear_oracle_has_no_higher_derivatives() {
    let o = pickwedge(
        &["julia", "--oracle", "linear:2,3", "--point", "0,0", "--direction", "1,1", "--max-order", "5"],
        None,
    );
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = v["result"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    for row in rows {
        if row["k"].as_u64().unwrap() >= 2 {
            assert_eq!(row["lhs"].as_f64().unwrap(), 0.0);
        }
    }
    assert_eq!(v["result"]["verdict"], "holds");
}

#[test]
fn usage_errors_exit_with_two() {
    let o = pickwedge(&["julia", "--point", "0,0", "--direction", "1,1"], None);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("--oracle") && err.to_lowercase().contains("usage"), "{err}");
    let o = pickwedge(&["scan", "--oracle", "geom2", "--base", "0,0", "--grid", "-1"], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn numeric_failures_exit_with_one_and_a_json_body() {
    let o = pickwedge(&["continue", "--oracle", "geom2", "--base", "0,0", "--target", "1.5,1.5", "--max-steps", "50"], None);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["error"]["kind"], "stuck");
}

#[test]
fn repeated_runs_are_byte_identical() {
    let runs: [&[&str]; 4] = [
        &["--seed", "7", "regulate", "--staircase", "2", "--grid", "0.1"],
        &["scan", "--oracle", "geom2", "--base", "0,0", "--grid", "0.05", "--order", "20"],
        &["continue", "--oracle", "geom2", "--base", "0,0", "--target", "-1.2,1.4"],
        &["julia", "--oracle", "neg_reciprocal_mean", "--point", "1,1", "--direction", "0.5,0.5"],
    ];
    for args in runs {
        let a = pickwedge(args, None);
        let b = pickwedge(args, None);
        assert!(a.status.success(), "{args:?}: {}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn outputs_embed_version_config_and_seed() {
    let version = env!("CARGO_PKG_VERSION");
    let csv = stdout(&pickwedge(&["--seed", "11", "scan", "--oracle", "geom2", "--base", "0,0", "--grid", "0.1"], None));
    let head: Vec<&str> = csv.lines().take(4).collect();
    assert_eq!(head[0], format!("# pickwedge {version}"));
    assert!(head[1].starts_with("# config: {") && head[1].contains("\"grid\":0.1"));
    assert_eq!(head[2], "# seed: 11");
    assert_eq!(data_rows(&csv)[0], "dx,dy,root,certified,convergent,agree");

    let o = pickwedge(&["--seed", "11", "julia", "--oracle", "geom2", "--point", "0,0", "--direction", "0.5,0.5"], None);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["version"], version);
    assert_eq!(v["seed"], 11);
    assert_eq!(v["config"]["command"]["julia"]["oracle"], "geom2");
}

#[test]
fn out_paths_resolve_against_the_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let o = pickwedge(&["vandermonde", "--max-degree", "4", "--out", "sweep.csv"], Some(dir.path()));
    assert!(o.status.success());
    let written = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(data_rows(&written).len(), 6);
    // rewriting replaces the file and leaves no temporaries behind
    let o = pickwedge(&["vandermonde", "--max-degree", "2", "--out", "sweep.csv"], Some(dir.path()));
    assert!(o.status.success());
    let names: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names, vec![std::ffi::OsString::from("sweep.csv")]);
    assert_eq!(data_rows(&std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap()).len(), 4);

    let absolute = dir.path().join("abs.json");
    let o = pickwedge(
        &["julia", "--oracle", "geom2", "--point", "0,0", "--direction", "0.5,0.5", "--out", absolute.to_str().unwrap()],
        None,
    );
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&absolute).unwrap()).unwrap();
    assert_eq!(v["tool"], "pickwedge");
}
