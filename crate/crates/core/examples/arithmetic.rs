//! Digits, norms and characters in Q_6, a ring with zero divisors.

use madic::{character, MadicNumber};

fn main() -> madic::Result<()> {
    let two = MadicNumber::from_i64(6, 2)?;
    let three = MadicNumber::from_i64(6, 3)?;
    let six = two.mul(&three)?;
    println!("|2| = {}, |3| = {}, |2 * 3| = {}", two.pseudonorm(), three.pseudonorm(), six.pseudonorm());

    let x: MadicNumber = "14.5 (base 6)".parse()?;
    println!("x = {}, valuation {:?}, |x| = {}", x.truncate(8), x.valuation(), x.pseudonorm());
    println!("-x = {}", x.neg().truncate(8));
    println!("1/5 = {}", MadicNumber::from_i64(6, 5)?.inverse()?.truncate(8));

    let k = MadicNumber::m_power(6, -1)?;
    for n in 0..6 {
        let chi = character(&k, &MadicNumber::from_i64(6, n)?)?;
        let (p, q) = chi.angle().as_ratio().unwrap();
        println!("chi({n}/6) = exp(2 pi i {p}/{q})");
    }
    Ok(())
}
