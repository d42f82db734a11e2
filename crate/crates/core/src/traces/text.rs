//! Tweet text normalization for the text-similarity trace.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

/// Code point ranges removed as emoji or pictographic symbols.
///
/// Covers the emoji and pictograph blocks plus the symbol blocks whose code
/// points are general category So, along with the emoji joiners and
/// modifiers (ZWJ, variation selectors, keycap, tag characters).
pub const EMOJI_RANGES: &[(u32, u32)] = &[
    (0x00A9, 0x00A9), // copyright sign
    (0x00AE, 0x00AE), // registered sign
    (0x200D, 0x200D), // zero width joiner
    (0x20E3, 0x20E3), // combining enclosing keycap
    (0x2122, 0x2122), // trade mark sign
    (0x2139, 0x2139),
    (0x2190, 0x21FF), // arrows
    (0x2300, 0x23FF), // miscellaneous technical
    (0x2460, 0x24FF), // enclosed alphanumerics
    (0x2500, 0x257F), // box drawing
    (0x2580, 0x259F), // block elements
    (0x25A0, 0x25FF), // geometric shapes
    (0x2600, 0x26FF), // miscellaneous symbols
    (0x2700, 0x27BF), // dingbats
    (0x2900, 0x297F), // supplemental arrows-b
    (0x2B00, 0x2BFF), // miscellaneous symbols and arrows
    (0x3030, 0x3030),
    (0x303D, 0x303D),
    (0x3297, 0x3297),
    (0x3299, 0x3299),
    (0xFE00, 0xFE0F),   // variation selectors
    (0x1F000, 0x1F02F), // mahjong tiles
    (0x1F030, 0x1F09F), // domino tiles
    (0x1F0A0, 0x1F0FF), // playing cards
    (0x1F100, 0x1F1FF), // enclosed alphanumeric supplement, regional indicators
    (0x1F200, 0x1F2FF), // enclosed ideographic supplement
    (0x1F300, 0x1F5FF), // misc symbols and pictographs, skin tones
    (0x1F600, 0x1F64F), // emoticons
    (0x1F650, 0x1F67F), // ornamental dingbats
    (0x1F680, 0x1F6FF), // transport and map
    (0x1F700, 0x1F77F), // alchemical symbols
    (0x1F780, 0x1F7FF), // geometric shapes extended
    (0x1F800, 0x1F8FF), // supplemental arrows-c
    (0x1F900, 0x1F9FF), // supplemental symbols and pictographs
    (0x1FA00, 0x1FA6F), // chess symbols
    (0x1FA70, 0x1FAFF), // symbols and pictographs extended-a
    (0xE0020, 0xE007F), // tags
];

/// Combining marks kept inside words when punctuation is stripped.
const COMBINING_RANGES: &[(u32, u32)] = &[
    (0x0300, 0x036F),
    (0x0483, 0x0489),
    (0x0591, 0x05BD),
    (0x05BF, 0x05C7),
    (0x0610, 0x061A),
    (0x064B, 0x065F),
    (0x0670, 0x0670),
    (0x06D6, 0x06ED),
    (0x0900, 0x0903),
    (0x093A, 0x094F),
    (0x0951, 0x0957),
    (0x0962, 0x0963),
    (0x0981, 0x0983),
    (0x09BC, 0x09D7),
    (0x0E31, 0x0E31),
    (0x0E34, 0x0E3A),
    (0x0E47, 0x0E4E),
    (0x1AB0, 0x1AFF),
    (0x1DC0, 0x1DFF),
    (0x20D0, 0x20E2),
    (0x20E4, 0x20FF),
    (0xFE20, 0xFE2F),
];

fn in_ranges(c: char, ranges: &[(u32, u32)]) -> bool {
    let cp = c as u32;
    ranges
        .binary_search_by(|&(lo, hi)| {
            if hi < cp {
                core::cmp::Ordering::Less
            } else if lo > cp {
                core::cmp::Ordering::Greater
            } else {
                core::cmp::Ordering::Equal
            }
        })
        .is_ok()
}

pub fn is_emoji(c: char) -> bool {
    in_ranges(c, EMOJI_RANGES)
}

fn is_combining(c: char) -> bool {
    in_ranges(c, COMBINING_RANGES)
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || is_combining(c)
}

fn is_scheme_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.')
}

/// Removes `scheme://...` runs up to the next whitespace.
fn strip_urls(text: &str) -> String {
    let chars: Vec<char> = text.chars().collect();
    let mut out: Vec<char> = Vec::with_capacity(chars.len());
    let mut i = 0;
    while i < chars.len() {
        if chars[i] == ':' && chars.get(i + 1) == Some(&'/') && chars.get(i + 2) == Some(&'/') {
            let mut start = out.len();
            while start > 0 && is_scheme_char(out[start - 1]) {
                start -= 1;
            }
            // the scheme has to begin with a letter
            while start < out.len() && !out[start].is_ascii_alphabetic() {
                start += 1;
            }
            if start < out.len() {
                out.truncate(start);
                while i < chars.len() && !chars[i].is_whitespace() {
                    i += 1;
                }
                continue;
            }
        }
        out.push(chars[i]);
        i += 1;
    }
    out.into_iter().collect()
}

/// Removes `marker` followed by a run of word characters.
fn strip_marked(text: &str, marker: char) -> String {
    let mut out = String::with_capacity(text.len());
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        if c == marker && chars.peek().is_some_and(|&n| is_word_char(n)) {
            while chars.peek().is_some_and(|&n| is_word_char(n)) {
                chars.next();
            }
            continue;
        }
        out.push(c);
    }
    out
}

/// Normalizes a post text into unigram tokens.
///
/// Steps, in order: lowercase, delete URLs, delete `@mentions`, delete
/// `#hashtags`, delete emoji, turn remaining punctuation into spaces, split on
/// whitespace, drop stopwords.
pub fn preprocess_text(text: &str, stopwords: &BTreeSet<String>) -> Vec<String> {
    let lowered = text.to_lowercase();
    let no_urls = strip_urls(&lowered);
    let no_mentions = strip_marked(&no_urls, '@');
    let no_tags = strip_marked(&no_mentions, '#');
    let cleaned: String = no_tags
        .chars()
        .filter(|&c| !is_emoji(c))
        .map(|c| {
            if c.is_whitespace() || is_word_char(c) {
                c
            } else {
                ' '
            }
        })
        .collect();
    cleaned
        .split_whitespace()
        .filter(|t| !stopwords.contains(*t))
        .map(String::from)
        .collect()
}

/// Small default English stopword list.
pub const DEFAULT_STOPWORDS: &[&str] = &[
    "a", "about", "after", "all", "am", "an", "and", "any", "are", "as", "at", "be", "because",
    "been", "before", "being", "but", "by", "can", "could", "did", "do", "does", "for", "from",
    "had", "has", "have", "he", "her", "here", "him", "his", "how", "i", "if", "in", "into", "is",
    "it", "its", "just", "me", "more", "my", "no", "not", "now", "of", "on", "or", "our", "out",
    "rt", "she", "so", "some", "than", "that", "the", "their", "them", "then", "there", "these",
    "they", "this", "to", "up", "us", "was", "we", "were", "what", "when", "which", "who", "will",
    "with", "would", "you", "your",
];

pub fn default_stopwords() -> BTreeSet<String> {
    DEFAULT_STOPWORDS.iter().map(|s| String::from(*s)).collect()
}
