use clap::Parser;
use fibjones::cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    let (output, code) = run(cli);
    if code == 0 {
        print!("{output}");
    } else {
        eprint!("{output}");
    }
    std::process::exit(code);
}
