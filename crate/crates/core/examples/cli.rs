//! Drive the command-line front end in-process.
use std::io::Write;

fn main() {
    let dir = std::env::temp_dir();
    let body = dir.join("convgeom_example_square.json");
    std::fs::File::create(&body)
        .and_then(|mut f| f.write_all(br#"{"kind":"polygon","vertices":[[1,-1],[1,1],[-1,1],[-1,-1]]}"#))
        .expect("temp dir is writable");
    let body = body.to_str().expect("utf-8 temp path");
    for args in [
        vec!["convgeom", "volume", "--body", body, "--tau", "1", "--x", "0.5,0.5"],
        vec!["convgeom", "shells", "--body", body, "--alphas", "1", "--n", "16", "--format", "csv"],
        vec!["convgeom", "report", "--body", body, "--n", "16"],
    ] {
        let code = convgeom::cli::run(args);
        println!("exit status {code}\n");
    }
}
