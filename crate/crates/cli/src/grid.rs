//! `--grid` syntax: entries `p:e_1,...,e_{p-1}[:level]` separated by `;`.
//! The empty string is the empty grid; a missing level takes the per-prime default.

use ggs_core::verify::{default_level, GridEntry};

pub fn parse_grid(src: &str) -> Result<Vec<GridEntry>, String> {
    src.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(parse_entry)
        .collect()
}

fn parse_entry(src: &str) -> Result<GridEntry, String> {
    let parts: Vec<&str> = src.split(':').map(str::trim).collect();
    if !(2..=3).contains(&parts.len()) {
        return Err(format!("grid entry `{src}`: expected p:e[:level]"));
    }
    let p: u32 = parts[0]
        .parse()
        .map_err(|_| format!("grid entry `{src}`: bad prime `{}`", parts[0]))?;
    let e = parse_vector(parts[1]).map_err(|m| format!("grid entry `{src}`: {m}"))?;
    let level = match parts.get(2) {
        Some(l) => l
            .parse()
            .map_err(|_| format!("grid entry `{src}`: bad level `{l}`"))?,
        None => default_level(p),
    };
    GridEntry::new(p, &e, level).map_err(|err| format!("grid entry `{src}`: {err}"))
}

pub fn parse_vector(src: &str) -> Result<Vec<i64>, String> {
    src.split(',')
        .map(|x| {
            x.trim()
                .parse::<i64>()
                .map_err(|_| format!("bad vector entry `{}`", x.trim()))
        })
        .collect()
}
