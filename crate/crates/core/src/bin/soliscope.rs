fn main() {
    soliscope::cli::main()
}
