//! Input generators shared by the benchmarks.

/// Deterministic pseudo-words of 1..=9 letters.
pub fn words(n: usize) -> String {
    let mut state: u32 = 0x9e37_79b9;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        state ^= state << 13;
        state ^= state >> 17;
        state ^= state << 5;
        let len = 1 + (state % 9) as usize;
        let c = (b'a' + (state >> 8) as u8 % 26) as char;
        out.push(c.to_string().repeat(len));
    }
    out.join(" ")
}

/// An option list with `n` entries, every fourth one carrying a braced value.
pub fn option_source(n: usize) -> String {
    (0..n)
        .map(|i| match i % 4 {
            0 => "font={small,it}".to_string(),
            1 => format!("margin={}pt", i % 30),
            2 => "labelsep=period".to_string(),
            _ => "singlelinecheck=off".to_string(),
        })
        .collect::<Vec<_>>()
        .join(",")
}

/// A scenario with `floats` figures, one section break every ten floats and
/// a list of figures at the end.
pub fn scenario_source(floats: usize) -> String {
    let mut s = String::from("usepackage {labelfont=bf,figurewithin=section}\n");
    for i in 0..floats {
        if i % 10 == 0 {
            s.push_str("stepcounter section\n");
        }
        s.push_str(&format!("begin figure\ncontent\ncaption \"{}\"\nend\n", words(20 + i % 30)));
    }
    s.push_str("listof figure\n");
    s
}
