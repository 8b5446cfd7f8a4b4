//! Drive the command-line front end from a scenario written on the fly.

use setint::cli::{main_with_args, EXIT_OK};

fn main() {
    let dir = std::env::temp_dir().join("setint-scenario-example");
    std::fs::create_dir_all(&dir).expect("temporary directory");
    let path = dir.join("jump.json");
    let scenario = r#"{
  "multifunction": {
    "name": "piecewise_jump",
    "A": {"dim": 2, "vertices": [[-1.0, 0.0], [1.0, 0.0]]},
    "B": {"dim": 2, "vertices": [[0.0, 0.0], [0.6, 0.0], [0.6, 0.6], [0.0, 0.6]]},
    "at": 0.3
  },
  "integrators": ["mcshane", "birkhoff", "pettis"],
  "tolerances": {"epsilon": 0.001, "m": 64, "tag_samples": 8, "seed": 5}
}
"#;
    std::fs::write(&path, scenario).expect("scenario file");
    let out = dir.join("reports");
    let code = main_with_args([
        "setint",
        "compare",
        "--scenario",
        path.to_str().expect("utf-8 path"),
        "--out",
        out.to_str().expect("utf-8 path"),
        "--format",
        "both",
    ]);
    println!(
        "exit code {code} (ok = {EXIT_OK}); reports in {}",
        out.display()
    );
}
