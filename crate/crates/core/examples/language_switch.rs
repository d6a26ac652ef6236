//! Flag replies that drift out of the expected language.

use finadapt::evalbench::{detect_language_switch, Language};

fn main() {
    let replies = [
        "Şirketin sermayesi 500.000 TL'ye artırılmıştır ve yeni paylar ortaklara dağıtılmıştır.",
        "Şirket tasfiye halindedir. 该公司正在清算中。",
        "Şirket tasfiye halindedir. The company has entered liquidation and all of its creditors are invited to submit their claims to the liquidator within the legal period.",
    ];
    for reply in replies {
        let result = detect_language_switch(reply, Language::Tr);
        println!("flagged={} {}", result.flagged, reply.chars().take(40).collect::<String>());
        for span in result.spans {
            println!("  {:?} [{}..{}] {:?}", span.kind, span.start, span.end, span.excerpt);
        }
    }
}
