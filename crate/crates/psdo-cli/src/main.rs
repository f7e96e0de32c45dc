fn main() {
    println!("psdo");
}
