// Split a stream of signed tokens into phrases and check each one.

use caddy::segmenter::segment;
use caddy::{check, parse_token_file, ParserEvent};

const STREAM: &str = "
start_comm
mosaic digit_1 digit_0 sep digit_1 digit_2   # map 10 by 12
start_comm
go_down                                      # forgot the distance
start_comm
go_down digit_1
end_comm
";

pub fn run_example() -> anyhow::Result<Vec<String>> {
    // the file format wants one mnemonic per line
    let text: String = STREAM
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(str::split_whitespace)
        .map(|t| format!("{t}\n"))
        .collect();
    let tokens = parse_token_file(&text).map_err(|(line, e)| anyhow::anyhow!("line {line}: {e}"))?;
    let mut verdicts = Vec::new();
    for event in segment(&tokens) {
        if let ParserEvent::PhraseComplete { tokens, terminator } = event {
            let v = match check(&tokens) {
                Ok(cmd) => format!("ok    {cmd}"),
                Err(e) => format!("error {e}"),
            };
            println!("{v:<60} ({terminator:?})");
            verdicts.push(v);
        }
    }
    Ok(verdicts)
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example().map(drop)
}
