use madic::special::mittag_leffler;

fn reference() -> Vec<(f64, f64, f64)> {
    include_str!("data/mittag_leffler.csv")
        .lines()
        .skip(1)
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|s| s.parse().unwrap()).collect();
            (v[0], v[1], v[2])
        })
        .collect()
}

#[test]
fn matches_extended_precision_reference() {
    let mut worst = (0.0, 0.0, 0.0);
    for (beta, y, r) in reference() {
        let e = mittag_leffler(beta, y).unwrap();
        let rel = (e - r).abs() / r.abs().max(f64::MIN_POSITIVE);
        if rel > worst.2 {
            worst = (beta, y, rel);
        }
    }
    assert!(worst.2 <= 1e-10, "worst relative error {:e} at beta {} y {}", worst.2, worst.0, worst.1);
}
