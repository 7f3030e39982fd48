// Drive the command-line pipeline in-process: generate, validate, compare.

use integral_indicators::cli;

pub fn run() -> i32 {
    let dir = tempfile::tempdir().expect("temporary directory");
    let d = dir.path().to_str().expect("utf-8 path").to_string();
    let (mut out, mut err) = (std::io::stdout(), std::io::stderr());
    let steps: [Vec<String>; 3] = [
        vec![
            "generate".into(),
            "--seed".into(),
            "5".into(),
            "--out-dir".into(),
            d.clone(),
        ],
        vec!["validate".into(), "--data".into(), format!("{d}/base.csv")],
        vec![
            "compare".into(),
            "--base".into(),
            format!("{d}/base.csv"),
            "--strategy".into(),
            format!("{d}/strategy.json"),
            "--out-dir".into(),
            format!("{d}/out"),
        ],
    ];
    for step in steps {
        let args = std::iter::once("integral".to_string()).chain(step);
        let code = cli::run(args, &mut out, &mut err);
        if code != 0 {
            return code;
        }
    }
    0
}

fn main() {
    std::process::exit(run());
}
