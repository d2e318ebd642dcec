//! Driving the command-line front end in-process.

use std::io::Write;

fn main() -> std::io::Result<()> {
    let dir = std::env::temp_dir().join("polyquant-cli-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("shear.endo");
    std::fs::File::create(&path)?.write_all(b"x1 -> x1 + x2^2\nx2 -> x2\n")?;
    let file = path.to_string_lossy().into_owned();
    for args in [
        vec!["check-auto", "--text", file.as_str()],
        vec!["approx", "--degree", "4", file.as_str()],
        vec!["bracket", "--n", "1", "x1^2", "p1", "--text"],
    ] {
        let out = polyquant::cli::run(std::iter::once("polyquant").chain(args.iter().copied()));
        print!("$ polyquant {}\n{}{}", args.join(" "), out.stdout, out.stderr);
    }
    Ok(())
}
