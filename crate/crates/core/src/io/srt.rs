use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One SubRip cue. Times are milliseconds from the start of the video.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubtitleCue {
    pub index: u32,
    pub start_ms: u64,
    pub end_ms: u64,
    pub text: String,
}

/// Line numbers are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SrtError {
    #[error("line {0}: malformed cue index")]
    MalformedIndex(usize),
    #[error("line {0}: malformed timestamp range")]
    MalformedTimestamp(usize),
    #[error("line {0}: cue index does not increase")]
    NonMonotonicIndex(usize),
}

pub fn parse_srt(text: &str) -> Result<Vec<SubtitleCue>, SrtError> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let lines: Vec<&str> = text.lines().map(|l| l.trim_end_matches('\r')).collect();
    let mut cues: Vec<SubtitleCue> = Vec::new();
    let mut i = 0;
    while i < lines.len() {
        if lines[i].trim().is_empty() {
            i += 1;
            continue;
        }
        let index_line = i + 1;
        let index: u32 = lines[i].trim().parse().map_err(|_| SrtError::MalformedIndex(index_line))?;
        if cues.last().is_some_and(|prev| index <= prev.index) {
            return Err(SrtError::NonMonotonicIndex(index_line));
        }
        i += 1;
        let time_line = i + 1;
        let (start_ms, end_ms) = lines
            .get(i)
            .and_then(|l| parse_range(l))
            .ok_or(SrtError::MalformedTimestamp(time_line))?;
        if start_ms >= end_ms {
            return Err(SrtError::MalformedTimestamp(time_line));
        }
        i += 1;
        let mut body = Vec::new();
        while i < lines.len() && !lines[i].trim().is_empty() {
            body.push(lines[i]);
            i += 1;
        }
        cues.push(SubtitleCue {
            index,
            start_ms,
            end_ms,
            text: body.join("\n"),
        });
    }
    Ok(cues)
}

fn parse_range(line: &str) -> Option<(u64, u64)> {
    let (start, end) = line.split_once("-->")?;
    Some((parse_timestamp(start.trim())?, parse_timestamp(end.trim())?))
}

/// `HH:MM:SS,mmm` (a `.` separator is also accepted).
fn parse_timestamp(text: &str) -> Option<u64> {
    let (clock, millis) = text.split_once([',', '.'])?;
    let mut parts = clock.split(':');
    let (h, m, s) = (parts.next()?, parts.next()?, parts.next()?);
    if parts.next().is_some() || millis.len() != 3 {
        return None;
    }
    let num = |t: &str| -> Option<u64> {
        if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        t.parse().ok()
    };
    let (h, m, s, ms) = (num(h)?, num(m)?, num(s)?, num(millis)?);
    if m >= 60 || s >= 60 {
        return None;
    }
    Some(((h * 60 + m) * 60 + s) * 1000 + ms)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_cues() {
        let text = "1\n00:00:01,000 --> 00:00:02,500\nFirst grab the frying pan\n\n2\n00:01:00,000 --> 01:00:00,001\nSet it\non the stove\n\n\n";
        let cues = parse_srt(text).unwrap();
        assert_eq!(cues.len(), 2);
        assert_eq!((cues[0].start_ms, cues[0].end_ms), (1000, 2500));
        assert_eq!((cues[1].start_ms, cues[1].end_ms), (60_000, 3_600_001));
        assert_eq!(cues[1].text, "Set it\non the stove");
    }

    #[test]
    fn empty_and_bom() {
        assert_eq!(parse_srt(""), Ok(vec![]));
        let cues = parse_srt("\u{feff}1\r\n00:00:00,000 --> 00:00:01,000\r\nHi\r\n").unwrap();
        assert_eq!(cues[0].text, "Hi");
    }

    #[test]
    fn reversed_range_is_malformed() {
        let text = "1\n00:00:05,000 --> 00:00:03,000\nbackwards\n";
        assert_eq!(parse_srt(text), Err(SrtError::MalformedTimestamp(2)));
    }

    #[test]
    fn errors_carry_lines() {
        assert_eq!(parse_srt("x\n"), Err(SrtError::MalformedIndex(1)));
        let text = "2\n00:00:00,000 --> 00:00:01,000\na\n\n2\n00:00:01,000 --> 00:00:02,000\nb\n";
        assert_eq!(parse_srt(text), Err(SrtError::NonMonotonicIndex(5)));
        assert_eq!(parse_srt("1\n00:00:00 --> 00:00:01,000\n"), Err(SrtError::MalformedTimestamp(2)));
        assert_eq!(parse_srt("1\n"), Err(SrtError::MalformedTimestamp(2)));
    }
}
