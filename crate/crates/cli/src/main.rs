fn main() { println!("beltrami"); }
