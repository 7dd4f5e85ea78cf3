import pytest

from nurceval.transcript import Genre, InquiryMeta, Quality

# Annotated references and ASR outputs printed for inquiry SP_D2_360, with the
# WER printed for each (two decimals, truncated) and the reference word count.
GOLDEN_REFS = [
    (
        "e dão muito trabalho tem esses esses problemas de juvenTUde esses negócios "
        "[( ) (não está muito na idade né?)",
        18,
    ),
    (
        "é eu [soube que também provocou um certo ciúmes ahn ahn isso eu (não) soube né eu VI... "
        "lá eu senti... um certo ciúmes ter:: éh ter sido escolhido uma mulher",
        31,
    ),
]
GOLDEN_HYPS = {
    # (reference row, model): (hypothesis, printed WER)
    (0, "candido"): ("mue dão muito trabalho tem esse s problemas de juventude esses negócio não não  uriamante ten", 0.50),
    (0, "ferreira"): ("me dão muito trabalho tem eos problemas de juventude esses negócio n não furiamunto tem", 0.55),
    (0, "grosman"): ("que dá muito trabalho tem esses problemas de juventude esses negócios não uriamusic", 0.44),
    (1, "candido"): (
        "e eu nsando que taambém provocou com certos filmes eu f isso eu soundão eu vi lá eu senti um "
        "certos filmes te tercido escolher de uma mulher",
        0.58,
    ),
    (1, "ferreira"): (
        "é eu souo que teambém posocou com certos filmes  isso eu soundão eu vi lá eu senti um certos "
        "filmes te ter sido escolhir de uma mulher",
        0.54,
    ),
    (1, "grosman"): (
        "e eu me que terão e provocou um certo filmes e isso eu sou eu vi lá eu senti um certo ciúmes e "
        "ter sido escolhido uma mulher",
        0.38,
    ),
}


@pytest.fixture
def meta():
    return InquiryMeta("SP_D2_360", Genre.D2, Quality.BAD, 3812)


def pytest_configure(config):
    config._acceptance_results = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = getattr(config, "_acceptance_results", [])
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in results:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
