//! `name=a..b` grid specifications, e.g. `n=2..3,k=2..3,m=1..3,L=1..3`.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GridSpec {
    ranges: BTreeMap<char, RangeInclusive<usize>>,
}

impl GridSpec {
    pub fn parse(spec: &str) -> Result<Self, String> {
        let mut ranges = BTreeMap::new();
        for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (name, range) = part
                .split_once('=')
                .ok_or_else(|| format!("expected name=a..b, got `{part}`"))?;
            let key = match name.trim() {
                "n" => 'n',
                "k" => 'k',
                "m" => 'm',
                "L" | "l" => 'L',
                other => return Err(format!("unknown grid parameter `{other}`")),
            };
            let range = parse_range(range.trim())?;
            if ranges.insert(key, range).is_some() {
                return Err(format!("parameter `{name}` given twice"));
            }
        }
        Ok(Self { ranges })
    }

    pub fn get(&self, name: char) -> Option<RangeInclusive<usize>> {
        self.ranges.get(&name).cloned()
    }

    /// Range for `name`, else the single value `fallback`.
    pub fn or(&self, name: char, fallback: usize) -> RangeInclusive<usize> {
        self.get(name).unwrap_or(fallback..=fallback)
    }
}

fn parse_range(text: &str) -> Result<RangeInclusive<usize>, String> {
    let parse = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| format!("`{s}` is not a non-negative integer"))
    };
    let range = match text.split_once("..") {
        Some((a, b)) => parse(a)?..=parse(b.trim_start_matches('='))?,
        None => {
            let v = parse(text)?;
            v..=v
        }
    };
    if range.is_empty() {
        return Err(format!("empty range `{text}`"));
    }
    Ok(range)
}
