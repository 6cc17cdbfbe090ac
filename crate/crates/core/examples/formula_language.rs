//! How formulas expand into terms and sub-models.

use typ3::formula::parse_with_warnings;

fn main() {
    let factors: Vec<String> = ["A", "B", "C"].iter().map(|s| s.to_string()).collect();
    let covariates = vec!["x".to_string()];
    let examples = [
        "y ~ A*B",
        "y ~ A*B*C - A:B:C",
        "y ~ A + A:B",
        "y ~ (A + B)^2",
        "y ~ A*B + x + x:A",
        "y ~ A + B - 1",
        "y ~ A + A",
        "y ~ A + D",
    ];
    for text in examples {
        match parse_with_warnings(text, &factors, &covariates) {
            Ok((spec, warnings)) => {
                println!("{text:<22} => {}", spec.render());
                for w in warnings {
                    println!("{:<22}    warning: {w}", "");
                }
            }
            Err(e) => println!("{text:<22} => error: {e}"),
        }
    }
}
