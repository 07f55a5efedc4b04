// Drive the command-line front end in-process: write a phantom to disk,
// degrade it, restore it and measure the result.

use ogstv::{cli, phantom, save_pgm};

pub fn run_example() -> ogstv::Result<String> {
    let dir = std::env::temp_dir().join("ogstv-cli-example");
    std::fs::create_dir_all(&dir).map_err(|e| ogstv::Error::Io { path: dir.clone(), source: e })?;
    let path = |name: &str| dir.join(name).to_string_lossy().into_owned();
    save_pgm(&phantom::piecewise_constant(64, 9), path("clean.pgm"))?;

    let commands: [Vec<String>; 3] = [
        ["degrade", "--in", &path("clean.pgm"), "--out", &path("observed.pgm"), "--kernel", "gaussian:7:2", "--bsnr", "40"]
            .map(String::from)
            .to_vec(),
        [
            "restore", "--in", &path("observed.pgm"), "--out", &path("restored.pgm"), "--kernel", "gaussian:7:2",
            "--alpha", "0.1", "--log", &path("log.csv"),
        ]
        .map(String::from)
        .to_vec(),
        ["metrics", "--ref", &path("clean.pgm"), "--est", &path("restored.pgm")].map(String::from).to_vec(),
    ];

    let mut transcript = String::new();
    for args in commands {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = cli::run(std::iter::once("ogstv".to_string()).chain(args.clone()), &mut out, &mut err);
        let out = String::from_utf8_lossy(&out);
        println!("$ ogstv {}\n{out}", args.join(" "));
        if code != cli::EXIT_OK {
            return Err(ogstv::Error::InvalidParameter(String::from_utf8_lossy(&err).into_owned()));
        }
        transcript.push_str(&out);
    }
    Ok(transcript)
}

fn main() -> ogstv::Result<()> {
    run_example().map(|_| ())
}
