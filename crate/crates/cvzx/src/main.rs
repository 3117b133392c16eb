fn main() {
    println!("cvzx");
}
