use alloc::string::String;

/// Extracts the normalized domain of an absolute URL.
///
/// The host is lowercased and one leading `www.` is removed. Returns `None`
/// when the string has no `scheme://host` part.
pub fn url_domain(url: &str) -> Option<String> {
    let url = url.trim();
    let (scheme, rest) = url.split_once("://")?;
    let mut sc = scheme.chars();
    if !sc.next()?.is_ascii_alphabetic()
        || !sc.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
    {
        return None;
    }
    let authority = rest.split(['/', '?', '#']).next().unwrap_or("");
    let hostport = match authority.rfind('@') {
        Some(at) => &authority[at + 1..],
        None => authority,
    };
    let (host, port) = if let Some(v6) = hostport.strip_prefix('[') {
        let end = v6.find(']')?;
        (&v6[..end], v6[end + 1..].strip_prefix(':'))
    } else {
        match hostport.split_once(':') {
            Some((h, p)) => (h, Some(p)),
            None => (hostport, None),
        }
    };
    if let Some(p) = port {
        if !p.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
    }
    if host.is_empty()
        || host.chars().any(|c| {
            c.is_whitespace()
                || c.is_control()
                || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '\\' | '^' | '`')
        })
    {
        return None;
    }
    let host = host.to_lowercase();
    let host = match host.strip_prefix("www.") {
        Some(h) => String::from(h),
        None => host,
    };
    if host.is_empty() || host.starts_with('.') {
        return None;
    }
    Some(host)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_host() {
        assert_eq!(
            url_domain("https://WWW.Example.com/a").as_deref(),
            Some("example.com")
        );
        assert_eq!(
            url_domain("http://example.com/b").as_deref(),
            Some("example.com")
        );
        assert_eq!(
            url_domain("https://user:pw@news.ru:8080/x?y").as_deref(),
            Some("news.ru")
        );
        assert_eq!(url_domain("http://[::1]:80/").as_deref(), Some("::1"));
        assert_eq!(
            url_domain("http://www.www.a.org").as_deref(),
            Some("www.a.org")
        );
    }

    #[test]
    fn rejects_non_urls() {
        assert_eq!(url_domain("not a url"), None);
        assert_eq!(url_domain("example.com/path"), None);
        assert_eq!(url_domain("https:///nohost"), None);
        assert_eq!(url_domain("1http://a.b"), None);
        assert_eq!(url_domain("http://a b.com"), None);
        assert_eq!(url_domain("http://a.com:port"), None);
    }
}
