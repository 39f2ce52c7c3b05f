//! Target-set specifiers: comma-separated indices, inclusive ranges
//! (`2-7`), or a ball predicate `ball:center,radius`.

use crate::UsageError;
use anyhow::Result;
use rieszcap_core::MetricMeasureSpace;

pub fn parse_set(spec: &str, space: &MetricMeasureSpace) -> Result<Vec<usize>> {
    let spec = spec.trim();
    if let Some(ball) = spec.strip_prefix("ball:") {
        let parts: Vec<&str> = ball.split(',').collect();
        if parts.len() != 2 {
            return Err(UsageError(format!(
                "ball specifier must be 'ball:center,radius', got '{spec}'"
            ))
            .into());
        }
        let center: usize = parts[0]
            .trim()
            .parse()
            .map_err(|_| UsageError(format!("invalid ball center '{}'", parts[0])))?;
        let radius: f64 = parts[1]
            .trim()
            .parse()
            .map_err(|_| UsageError(format!("invalid ball radius '{}'", parts[1])))?;
        let members = space.ball_members(center, radius)?;
        if members.is_empty() {
            return Err(UsageError(format!(
                "ball:{center},{radius} selects no points"
            ))
            .into());
        }
        return Ok(members);
    }
    let mut out = Vec::new();
    for token in spec.split(',') {
        let token = token.trim();
        if token.is_empty() {
            continue;
        }
        match token.split_once('-') {
            Some((a, b)) => {
                let lo: usize = a
                    .trim()
                    .parse()
                    .map_err(|_| UsageError(format!("invalid index '{a}' in '{token}'")))?;
                let hi: usize = b
                    .trim()
                    .parse()
                    .map_err(|_| UsageError(format!("invalid index '{b}' in '{token}'")))?;
                if lo > hi {
                    return Err(UsageError(format!("empty range '{token}'")).into());
                }
                out.extend(lo..=hi);
            }
            None => {
                let idx: usize = token
                    .parse()
                    .map_err(|_| UsageError(format!("invalid index '{token}'")))?;
                out.push(idx);
            }
        }
    }
    if out.is_empty() {
        return Err(UsageError(format!("set specifier '{spec}' selects no points")).into());
    }
    out.sort_unstable();
    out.dedup();
    for &i in &out {
        space.check_index(i)?;
    }
    Ok(out)
}

pub fn parse_radius_cap(text: &str) -> Result<f64> {
    match text.trim() {
        "inf" | "INF" | "infinity" => Ok(f64::INFINITY),
        other => other
            .parse::<f64>()
            .map_err(|_| UsageError(format!("invalid radius cap '{other}'")).into()),
    }
}
