fn main() {
    // Subcommands land once the experiment layer is wired up.
    eprintln!("weylstep: no experiments wired yet");
    std::process::exit(2);
}
