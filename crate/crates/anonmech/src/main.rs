fn main() {
    anonmech::cli_main();
}
