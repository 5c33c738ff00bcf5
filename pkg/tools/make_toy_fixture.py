"""Regenerate the bundled toy two-domain fixture.

Writes into src/pgen_bt/data/:

    toy_authentic.tsv   500 gloss<TAB>text pairs, weather-report domain
    toy_test.tsv        100 held-out pairs from the same grammar
    toy_general.txt     1000 general-domain sentences (talks / everyday prose),
                        about 15% of which borrow weather vocabulary

The grammar is tiny and hand-written; texts are lowercase German-like, glosses
uppercase and monotone with function words dropped. Output is a pure function
of SEED.

    python tools/make_toy_fixture.py
"""
import random
from pathlib import Path

SEED = 20230611
OUT = Path(__file__).resolve().parent.parent / "src" / "pgen_bt" / "data"

# (text, gloss) pairs; gloss "" means the phrase is dropped in gloss
TIMES = [
    ("morgen", "MORGEN"), ("heute", "HEUTE"), ("heute nacht", "HEUTE NACHT"),
    ("in der nacht", "NACHT"), ("am tag", "TAG"), ("übermorgen", "UEBERMORGEN"),
    ("am montag", "MONTAG"), ("am dienstag", "DIENSTAG"), ("am mittwoch", "MITTWOCH"),
    ("am donnerstag", "DONNERSTAG"), ("am freitag", "FREITAG"), ("am samstag", "SAMSTAG"),
    ("am sonntag", "SONNTAG"), ("am wochenende", "WOCHENENDE"), ("später", "SPAETER"),
    ("am nachmittag", "NACHMITTAG"), ("am abend", "ABEND"), ("am morgen", "FRUEH"),
]
REGIONS = [
    ("im norden", "NORD"), ("im süden", "SUED"), ("im osten", "OST"), ("im westen", "WEST"),
    ("im nordwesten", "NORDWEST"), ("im nordosten", "NORDOST"), ("im südwesten", "SUEDWEST"),
    ("im südosten", "SUEDOST"), ("an den küsten", "KUESTE"), ("in den bergen", "BERG"),
    ("an der see", "SEE"), ("in bayern", "BAYERN"), ("an den alpen", "ALPEN"),
    ("im flachland", "FLACHLAND"), ("in der mitte", "MITTE"), ("örtlich", "REGION"),
]
# clause used after a fronted time/region: verb-second order
PHEN_V2 = [
    ("regnet es", "REGEN"), ("gibt es schauer", "SCHAUER"), ("gibt es gewitter", "GEWITTER"),
    ("scheint die sonne", "SONNE"), ("ist es bewölkt", "WOLKE"), ("schneit es", "SCHNEE"),
    ("ist es neblig", "NEBEL"), ("gibt es sturmböen", "STURM"), ("bleibt es trocken", "TROCKEN"),
    ("gibt es glätte", "GLATT"), ("fällt schneeregen", "SCHNEE REGEN"),
    ("gibt es frost", "FROST"), ("ist es heiter", "HEITER"), ("gibt es nieselregen", "NIESEL"),
    ("lockert es auf", "AUFLOCKERN"), ("ist es wechselhaft", "WECHSELHAFT"),
]
PHEN_PL = [
    ("schauer", "SCHAUER"), ("gewitter", "GEWITTER"), ("wolken", "WOLKE"),
    ("regenwolken", "REGEN WOLKE"), ("schneeschauer", "SCHNEE SCHAUER"), ("tiefs", "TIEF"),
]
ADJ = [
    ("kalt", "KALT"), ("warm", "WARM"), ("heiß", "HEISS"), ("mild", "MILD"),
    ("frostig", "FROST"), ("freundlich", "FREUNDLICH"), ("kühler", "KUEHL"),
    ("wärmer", "WARM"), ("sonnig", "SONNE"), ("unbeständig", "WECHSELHAFT"),
]
STRENGTH = [
    ("schwach", "SCHWACH"), ("mäßig", "MAESSIG"), ("frisch", "FRISCH"), ("stark", "STARK"),
    ("stürmisch", "STURM"), ("schwach bis mäßig", "SCHWACH BIS MAESSIG"),
    ("mäßig bis frisch", "MAESSIG BIS FRISCH"), ("frisch bis stark", "FRISCH BIS STARK"),
]
DIRS = [
    ("norden", "NORD"), ("süden", "SUED"), ("osten", "OST"), ("westen", "WEST"),
    ("nordwesten", "NORDWEST"), ("südwesten", "SUEDWEST"),
]
NUMS = [
    ("minus fünf", "MINUS FUENF"), ("minus zwei", "MINUS ZWEI"), ("null", "NULL"),
    ("zwei", "ZWEI"), ("drei", "DREI"), ("fünf", "FUENF"), ("sieben", "SIEBEN"),
    ("acht", "ACHT"), ("zehn", "ZEHN"), ("zwölf", "ZWOELF"), ("vierzehn", "VIERZEHN"),
    ("sechzehn", "SECHZEHN"), ("achtzehn", "ACHTZEHN"), ("zwanzig", "ZWANZIG"),
    ("zweiundzwanzig", "ZWEIUNDZWANZIG"), ("fünfundzwanzig", "FUENFUNDZWANZIG"),
    ("dreißig", "DREISSIG"),
]
FIXED = [
    ("guten abend liebe zuschauer", "GUT ABEND LIEB ZUSCHAUER"),
    ("ich wünsche ihnen einen schönen abend", "SCHOEN ABEND"),
    ("und nun die wettervorhersage für morgen", "JETZT WETTER MORGEN"),
    ("ihnen noch einen schönen tag", "SCHOEN TAG"),
    ("das war das wetter", "WETTER"),
]


def _pick(rng, table):
    return rng.choice(table)


def weather_pair(rng):
    """One (gloss, text) pair from the weather grammar."""
    r = rng.random()
    if r < 0.04:
        text, gloss = _pick(rng, FIXED)
        return gloss, text
    t, tg = _pick(rng, TIMES)
    g, gg = _pick(rng, REGIONS)
    p, pg = _pick(rng, PHEN_V2)
    if r < 0.30:
        text = f"{t} {p} {g}"
        gloss = f"{tg} {pg} {gg}"
        if rng.random() < 0.4:
            p2, pg2 = _pick(rng, PHEN_V2)
            g2, gg2 = _pick(rng, REGIONS)
            text += f" und {g2} {p2}"
            gloss += f" {gg2} {pg2}"
    elif r < 0.45:
        a, ag = _pick(rng, ADJ)
        text = f"{t} wird es {g} {a}"
        gloss = f"{tg} {gg} {ag}"
    elif r < 0.62:
        lo = rng.randrange(len(NUMS) - 3)
        hi = rng.randrange(lo + 1, len(NUMS))
        (n1, ng1), (n2, ng2) = NUMS[lo], NUMS[hi]
        if rng.random() < 0.5:
            text = f"die temperaturen liegen {t} zwischen {n1} und {n2} grad"
            gloss = f"TEMPERATUR {tg} {ng1} BIS {ng2} GRAD"
        else:
            text = f"{t} {n1} grad {g} und bis {n2} grad {_pick(rng, REGIONS)[0]}"
            gloss = f"{tg} {ng1} GRAD {gg} BIS {ng2} GRAD"
    elif r < 0.78:
        s, sg = _pick(rng, STRENGTH)
        text = f"der wind weht {s} {g}"
        gloss = f"WIND {sg} {gg}"
        if rng.random() < 0.35:
            text += " mit starken böen"
            gloss += " STARK BOEE"
    elif r < 0.90:
        d, dg = _pick(rng, DIRS)
        pp, ppg = _pick(rng, PHEN_PL)
        text = f"{t} ziehen von {d} {pp} heran"
        gloss = f"{tg} {dg} {ppg} KOMMEN"
    else:
        text = f"{g} {p} {t}"
        gloss = f"{gg} {pg} {tg}"
    return gloss, text


SUBJECTS = [
    "ich", "wir", "meine mutter", "unser team", "die forscher", "viele menschen",
    "mein freund", "die regierung", "die kinder", "jeder von uns", "die firma",
    "die studenten", "meine schwester", "die ärzte", "die ingenieure", "diese frau",
]
VERBS_OBJ = [
    "habe ein buch gelesen", "haben eine app entwickelt", "bauen roboter",
    "lernen programmieren", "erforschen das gehirn", "haben ein problem gelöst",
    "verkaufen software", "lieben musik", "sprechen über demokratie",
    "haben eine idee", "brauchen mehr geld", "finden neue lösungen",
    "schreiben gedichte", "haben das internet verändert", "messen daten",
    "analysieren genome", "kochen gerne", "unterrichten mathematik",
    "organisieren eine konferenz", "testen medikamente", "diskutieren die zukunft",
    "verstehen die wirtschaft", "spielen fußball", "malen bilder",
]
COMPLEMENTS = [
    "in der schule", "an der universität", "in afrika", "in new york", "im labor",
    "seit zehn jahren", "jeden tag", "mit großer freude", "für die gesellschaft",
    "im krankenhaus", "auf der bühne", "in unserem dorf", "ohne hilfe",
    "mit künstlicher intelligenz", "für die umwelt", "in der stadt", "zu hause",
    "im internet", "während der pandemie", "in china", "mit ihren händen",
]
CLAIMS = [
    "das ist eine wichtige frage", "wissenschaft ist spannend", "technologie verändert alles",
    "bildung ist der schlüssel", "das gehirn ist komplex", "geschichte wiederholt sich",
    "die wirtschaft wächst langsam", "kunst macht uns menschlich", "daten sind das neue öl",
    "demokratie braucht vertrauen", "musik verbindet kulturen", "gesundheit ist ein menschenrecht",
    "das universum ist riesig", "sprache formt das denken", "freiheit hat einen preis",
    "die zukunft gehört den mutigen", "neugier treibt den fortschritt",
]
OPENERS = [
    "ich glaube", "wir wissen", "es stellt sich heraus", "lassen sie mich sagen",
    "stellen sie sich vor", "ich denke", "die wahrheit ist", "vielleicht wissen sie",
]
# general sentences that borrow weather words; they make selection non-trivial
OUTDOOR = [
    "am wochenende wandern wir in den bergen",
    "als kind habe ich den regen geliebt",
    "die sonne ist ein stern wie viele andere",
    "im norden des landes leben viele menschen",
    "der wind treibt die windräder an",
    "wir haben im süden ein haus gebaut",
    "morgen fliege ich nach new york",
    "der klimawandel bringt mehr gewitter und stürme",
    "im winter fällt in den bergen viel schnee",
    "heute nacht habe ich kaum geschlafen",
    "an der see ist die luft frisch",
    "die temperaturen steigen weltweit",
    "im osten des kontinents ist es trocken",
    "bei regen bleiben wir zu hause",
    "der frost hat die ernte zerstört",
    "am abend sitzen wir am feuer",
    "die wolken über der stadt waren dunkel",
    "im westen gibt es viele fabriken",
]


def general_sentence(rng):
    r = rng.random()
    if r < 0.15:
        s = _pick(rng, OUTDOOR)
        if rng.random() < 0.5:
            s = f"{_pick(rng, OPENERS)} {s}"
        return s
    if r < 0.55:
        s = f"{_pick(rng, SUBJECTS)} {_pick(rng, VERBS_OBJ)}"
        if rng.random() < 0.7:
            s += f" {_pick(rng, COMPLEMENTS)}"
        return s
    if r < 0.85:
        return f"{_pick(rng, OPENERS)} {_pick(rng, CLAIMS)}"
    return f"{_pick(rng, CLAIMS)} und {_pick(rng, SUBJECTS)} {_pick(rng, VERBS_OBJ)}"


def main():
    rng = random.Random(SEED)
    OUT.mkdir(parents=True, exist_ok=True)
    pairs = [weather_pair(rng) for _ in range(600)]
    with open(OUT / "toy_authentic.tsv", "w", encoding="utf-8", newline="\n") as f:
        for g, t in pairs[:500]:
            f.write(f"{g}\t{t}\n")
    with open(OUT / "toy_test.tsv", "w", encoding="utf-8", newline="\n") as f:
        for g, t in pairs[500:]:
            f.write(f"{g}\t{t}\n")
    with open(OUT / "toy_general.txt", "w", encoding="utf-8", newline="\n") as f:
        for _ in range(1000):
            f.write(general_sentence(rng) + "\n")


if __name__ == "__main__":
    main()
