#!/usr/bin/env python3
"""Writes the replay fixtures used by the core, service and CLI tests.

Run from anywhere: python3 build_corpus.py
Outputs (next to this script):
  corpus/    one directory per end-to-end scenario, plus two extra ids
  cascade/   one directory per provider cascade branch
  snapshot_toy.jsonl
Expected outcomes live in the Rust tests, not here.
"""

import json
import zlib
from datetime import datetime, timezone
from email.utils import format_datetime
import shutil
from pathlib import Path
from urllib.parse import quote, quote_plus

HERE = Path(__file__).resolve().parent

ARXIV = "https://export.arxiv.org/api/query?id_list="
DBLP = "https://dblp.org/search/publ/api?q={}&format=json&h=5"
DOI_ORG = "https://doi.org/{}"
CROSSREF = "https://api.crossref.org/works?query.bibliographic={}&sort=score&rows=10"
S2_FIELDS = ("title,authors,journal,venue,year,abstract,publicationTypes,externalIds,isOpenAccess,"
             "publicationDate,fieldsOfStudy,s2FieldsOfStudy,referenceCount,citationCount,"
             "influentialCitationCount")
S2 = "https://api.semanticscholar.org/graph/v1/paper/"
OPENALEX = "https://api.openalex.org/works"


def pct(s):
    return quote(s, safe="")


def dblp_url(title):
    return DBLP.format(quote_plus(title, safe=""))


def crossref_url(title):
    return CROSSREF.format(pct(title))


def s2_arxiv_url(arxiv_id):
    return f"{S2}ARXIV:{arxiv_id}?fields={S2_FIELDS}"


def s2_doi_url(doi):
    return f"{S2}DOI:{doi}?fields={S2_FIELDS}"


def s2_search_url(title):
    return f"{S2}search?query={pct(title)}&limit=10&fields={S2_FIELDS}"


def oa_doi_url(doi):
    return f"{OPENALEX}/doi={doi}"


def oa_search_url(title):
    return f"{OPENALEX}?search={pct(title)}"


class Fixtures:
    def __init__(self, directory):
        self.dir = directory
        self.dir.mkdir(parents=True, exist_ok=True)

    def add(self, name, url, body, status=200):
        if not isinstance(body, str):
            body = json.dumps(body, ensure_ascii=False, indent=1)
        head = url if status == 200 else f"{url} {status}"
        (self.dir / f"{name}.fixture").write_text(f"{head}\n{body}", encoding="utf-8")


# ---------------------------------------------------------------- payloads

def arxiv_feed(arxiv_id, title, authors, published, doi=None, journal_ref=None,
               primary="cs.LG", categories=("cs.LG",), version=1):
    extra = ""
    if doi:
        extra += f'\n    <arxiv:doi xmlns:arxiv="http://arxiv.org/schemas/atom">{doi}</arxiv:doi>'
    if journal_ref:
        extra += f'\n    <arxiv:journal_ref xmlns:arxiv="http://arxiv.org/schemas/atom">{journal_ref}</arxiv:journal_ref>'
    author_xml = "\n".join(f"    <author><name>{a}</name></author>" for a in authors)
    cat_xml = "\n".join(
        f'    <category term="{c}" scheme="http://arxiv.org/schemas/atom"/>' for c in categories)
    return f"""<?xml version="1.0" encoding="UTF-8"?>
<feed xmlns="http://www.w3.org/2005/Atom">
  <title type="html">ArXiv Query: id_list={arxiv_id}</title>
  <opensearch:totalResults xmlns:opensearch="http://a9.com/-/spec/opensearch/1.1/">1</opensearch:totalResults>
  <entry>
    <id>http://arxiv.org/abs/{arxiv_id}v{version}</id>
    <updated>{published}T12:00:00Z</updated>
    <published>{published}T12:00:00Z</published>
    <title>{title}</title>
    <summary>Abstract of {arxiv_id}.</summary>
{author_xml}{extra}
    <link href="http://arxiv.org/abs/{arxiv_id}v{version}" rel="alternate" type="text/html"/>
    <arxiv:primary_category xmlns:arxiv="http://arxiv.org/schemas/atom" term="{primary}" scheme="http://arxiv.org/schemas/atom"/>
{cat_xml}
  </entry>
</feed>
"""


def arxiv_empty(arxiv_id):
    return f"""<?xml version="1.0" encoding="UTF-8"?>
<feed xmlns="http://www.w3.org/2005/Atom">
  <title type="html">ArXiv Query: id_list={arxiv_id}</title>
  <opensearch:totalResults xmlns:opensearch="http://a9.com/-/spec/opensearch/1.1/">0</opensearch:totalResults>
</feed>
"""


def dblp_hit(title, authors, venue="ICLR", year=2021, kind="Conference and Workshop Papers",
             doi=None, key=None, ee=None, pages=None, volume=None):
    info = {
        "authors": {"author": [{"@pid": f"p{i}", "text": a} for i, a in enumerate(authors)]},
        "title": title + ".",
        "venue": venue,
        "year": str(year),
        "type": kind,
        "key": key or f"conf/x/{zlib.crc32(title.encode()) % 10**6}",
    }
    if len(authors) == 1:
        info["authors"]["author"] = info["authors"]["author"][0]
    if doi:
        info["doi"] = doi
        info["ee"] = ee or f"https://doi.org/{doi}"
    elif ee:
        info["ee"] = ee
    if pages:
        info["pages"] = pages
    if volume:
        info["volume"] = volume
    return {"@score": "1", "@id": "1", "info": info}


def dblp_result(hits):
    return {"result": {"query": "q", "status": {"@code": "200", "text": "OK"},
                       "hits": {"@total": str(len(hits)), "@computed": str(len(hits)),
                                "@sent": str(len(hits)), "@first": "0",
                                **({"hit": hits} if hits else {})}}}


def csl_author(name):
    given, family = name.rsplit(" ", 1)
    return {"given": given, "family": family, "sequence": "additional"}


def csl_item(title, authors, doi, kind="journal-article", container="Journal of Testing",
             year=2021, citations=3, as_list=True):
    item = {
        "type": kind,
        "title": [title] if as_list else title,
        "author": [csl_author(a) for a in authors],
        "DOI": doi,
        "container-title": [container] if as_list else container,
        "issued": {"date-parts": [[year, 5]]},
        "publisher": "Test Press",
        "volume": "12",
        "page": "1-20",
        "URL": f"https://doi.org/{doi}",
        "is-referenced-by-count": citations,
    }
    return item


def crossref_result(items):
    return {"status": "ok", "message-type": "work-list",
            "message": {"total-results": len(items), "items": items}}


def s2_paper(title, authors, arxiv_id=None, doi=None, venue="NeurIPS", journal=None,
             types=("Conference",), year=2021, citations=10):
    ids = {"CorpusId": 1000 + (zlib.crc32(title.encode()) % 1000)}
    if arxiv_id:
        ids["ArXiv"] = arxiv_id
    if doi:
        ids["DOI"] = doi
    return {
        "paperId": f"s2-{zlib.crc32(title.encode()) % 10**8}",
        "externalIds": ids,
        "title": title,
        "abstract": None,
        "venue": venue,
        "year": year,
        "referenceCount": 5,
        "citationCount": citations,
        "influentialCitationCount": 0,
        "isOpenAccess": True,
        "fieldsOfStudy": ["Computer Science"],
        "s2FieldsOfStudy": [],
        "publicationTypes": list(types) if types is not None else None,
        "publicationDate": f"{year}-06-01",
        "journal": journal,
        "authors": [{"authorId": str(i), "name": a} for i, a in enumerate(authors)],
    }


def s2_missing(what):
    return {"error": f"Paper with id {what} not found"}


def s2_search(papers):
    body = {"total": len(papers), "offset": 0}
    if papers:
        body["data"] = papers
    return body


def oa_work(title, authors, doi=None, arxiv_id=None, source="Journal of Open Results",
            source_type="journal", year=2021, citations=4, work_id="W1"):
    locations = [{
        "is_oa": True,
        "landing_page_url": f"https://doi.org/{doi}" if doi else f"https://example.org/{work_id}",
        "pdf_url": None,
        "source": {"display_name": source, "type": source_type,
                   "host_organization_name": "Open Publisher"},
    }]
    if arxiv_id:
        locations.append({
            "is_oa": True,
            "landing_page_url": f"https://arxiv.org/abs/{arxiv_id}",
            "pdf_url": f"https://arxiv.org/pdf/{arxiv_id}",
            "source": {"display_name": "arXiv (Cornell University)", "type": "repository"},
        })
    return {
        "id": f"https://openalex.org/{work_id}",
        "doi": f"https://doi.org/{doi}" if doi else None,
        "title": title,
        "display_name": title,
        "publication_year": year,
        "type": "article",
        "ids": {"openalex": f"https://openalex.org/{work_id}",
                **({"doi": f"https://doi.org/{doi}"} if doi else {})},
        "primary_location": locations[0],
        "locations": locations,
        "authorships": [{"author_position": "middle", "author": {"display_name": a},
                         "raw_author_name": a} for a in authors],
        "open_access": {"is_oa": True},
        "cited_by_count": citations,
        "biblio": {"volume": "7", "issue": "2", "first_page": "100", "last_page": "120"},
    }


def oa_result(works):
    return {"meta": {"count": len(works), "page": 1, "per_page": 25}, "results": works}


DBLP_MISS = dblp_result([])
CROSSREF_MISS = crossref_result([])
S2_SEARCH_MISS = s2_search([])
OA_MISS = oa_result([])


def noise(tag, i):
    return f"Unrelated Study {tag} Number {i} on Graph Colouring"


# ---------------------------------------------------------------- corpus

def scenario(root, n, slug, title, authors, doi=None, *, dblp=DBLP_MISS, crosscite=None,
             crossref=CROSSREF_MISS, s2_arxiv=None, s2_doi=None, s2_search_body=S2_SEARCH_MISS,
             oa_doi=None, oa_search=OA_MISS, skip=()):
    """Writes the fixtures for one scenario. Steps listed in `skip` are not
    reached by the cascade and get no fixture."""
    arxiv_id = f"2101.{n:05d}"
    f = Fixtures(root / f"s{n:02d}_{slug}")
    f.add("arxiv", ARXIV + arxiv_id,
          arxiv_feed(arxiv_id, title, authors, f"2021-01-{(n % 28) + 1:02d}", doi=doi))

    if isinstance(dblp, tuple):
        f.add("dblp", dblp_url(title), dblp[1], status=dblp[0])
    else:
        f.add("dblp", dblp_url(title), dblp)

    if doi:
        if crosscite is None:
            f.add("crosscite", DOI_ORG.format(doi), "DOI Not Found", status=404)
        else:
            f.add("crosscite", DOI_ORG.format(doi), crosscite)
    if "crossref" not in skip:
        if isinstance(crossref, tuple):
            f.add("crossref", crossref_url(title), crossref[1], status=crossref[0])
        else:
            f.add("crossref", crossref_url(title), crossref)

    if s2_arxiv is None:
        f.add("s2_arxiv", s2_arxiv_url(arxiv_id), s2_missing(f"ARXIV:{arxiv_id}"), status=404)
    else:
        f.add("s2_arxiv", s2_arxiv_url(arxiv_id), s2_arxiv)
    if doi and "s2_doi" not in skip:
        if s2_doi is None:
            f.add("s2_doi", s2_doi_url(doi), s2_missing(f"DOI:{doi}"), status=404)
        else:
            f.add("s2_doi", s2_doi_url(doi), s2_doi)
    if "s2_search" not in skip:
        if isinstance(s2_search_body, tuple):
            f.add("s2_search", s2_search_url(title), s2_search_body[1], status=s2_search_body[0])
        else:
            f.add("s2_search", s2_search_url(title), s2_search_body)

    if doi:
        if oa_doi is None:
            f.add("oa_doi", oa_doi_url(doi), "", status=404)
        else:
            f.add("oa_doi", oa_doi_url(doi), oa_doi)
    if "oa_search" not in skip:
        f.add("oa_search", oa_search_url(title), oa_search)
    return arxiv_id


def build_corpus(root):
    A2 = ["Ann Smith", "Bo Chen"]
    A3 = ["Carla Rossi", "Dev Patel", "Eun Kim"]
    A4 = ["Fay Wong", "Gus Berg", "Hal Ito", "Ida Novak"]

    t = "Sparse Attention for Long Documents"
    scenario(root, 1, "dblp_only", t, A2,
             dblp=dblp_result([dblp_hit(t, A2, doi="10.5555/s01", pages="1-12")]))

    t = "Robust Estimation under Label Noise"
    scenario(root, 2, "crossref_search_only", t, A3,
             crossref=crossref_result([
                 csl_item(t, A3, "10.5555/s02"),
                 csl_item(noise("C", 2), ["Zed Quinn"], "10.5555/n02"),
             ]))

    t = "Curriculum Sampling for Reinforcement Learning"
    scenario(root, 3, "crosscite_doi_only", t, A2, doi="10.5555/s03",
             crosscite=csl_item(t, A2, "10.5555/s03", as_list=False), skip=("crossref",))

    t = "Federated Averaging with Stale Clients"
    scenario(root, 4, "s2_weak_only", t, A3,
             s2_arxiv=s2_paper(t, A3, arxiv_id="2101.00004", doi="10.5555/s04", venue="AAAI"),
             skip=("s2_search",))

    t = "Contrastive Pretraining of Tabular Encoders"
    scenario(root, 5, "s2_search_only", t, A2,
             s2_search_body=s2_search([
                 s2_paper(t, A2, doi="10.5555/s05", venue="KDD"),
                 s2_paper(noise("S", 5), ["Yan Liu"], doi="10.5555/n05"),
             ]))

    t = "Graph Rewiring Reduces Oversquashing"
    works = [oa_work(noise("O", i), ["Xi Zhao"], doi=f"10.5555/n06{i}", work_id=f"W6{i}")
             for i in range(7)]
    works[3] = oa_work("Graph Rewiring Provably Reduces Oversquashing in Deep GNNs",
                       ["Fay Wong"], doi="10.5555/s06", arxiv_id="2101.00006", work_id="W63")
    scenario(root, 6, "openalex_weak", t, A4, oa_search=oa_result(works))

    t = "Calibrated Uncertainty for Medical Segmentation"
    scenario(root, 7, "openalex_strong", t, A3,
             oa_search=oa_result([
                 oa_work(noise("O", 70), ["Xi Zhao"], doi="10.5555/n70", work_id="W70"),
                 oa_work(t, A3, doi="10.5555/s07", work_id="W71"),
                 oa_work(noise("O", 72), ["Xi Zhao"], doi="10.5555/n72", work_id="W72"),
             ]))

    t = "Efficient Transformers for Speech Recognition"
    scenario(root, 8, "all_four", t, A4,
             dblp=dblp_result([dblp_hit(t, A4, venue="ICASSP", doi="10.5555/s08")]),
             crossref=crossref_result([csl_item(t, A4, "10.5555/s08", kind="proceedings-article",
                                                container="Proc. ICASSP")]),
             s2_arxiv=s2_paper(t, A4, arxiv_id="2101.00008", doi="10.5555/s08", venue="ICASSP"),
             oa_search=oa_result([oa_work(t, A4, doi="10.5555/s08", arxiv_id="2101.00008",
                                          source="ICASSP", source_type="conference",
                                          work_id="W8")]),
             skip=("s2_search",))

    t = "Quantile Regression Forests Revisited"
    scenario(root, 9, "all_four_doi", t, A2, doi="10.5555/s09",
             dblp=dblp_result([dblp_hit(t, A2, venue="J. Mach. Learn. Res.", kind="Journal Articles",
                                        doi="10.5555/s09", volume="22")]),
             crosscite=csl_item(t, A2, "10.5555/s09", as_list=False, container="JMLR"),
             s2_doi=s2_paper(t, A2, doi="10.5555/s09", venue="JMLR", types=("JournalArticle",)),
             oa_doi=oa_work(t, A2, doi="10.5555/s09", work_id="W9"),
             skip=("crossref", "s2_search", "oa_search"))

    t = "A Note on Unpublished Ideas"
    scenario(root, 10, "unresolved_empty", t, A2)

    t = "Failure Modes of Flaky Services"
    scenario(root, 11, "unresolved_errors", t, A3,
             dblp=(500, "<html>Internal Server Error</html>"),
             crossref="<html>not json</html>",
             s2_search_body=(429, '{"message": "Too Many Requests"}'))

    t = "Learning to Rank with Implicit Feedback"
    changed = "Unbiased Learning-to-Rank from Biased Click Logs: A Journal Study"
    scenario(root, 12, "title_changed_weak", t, A3,
             dblp=dblp_result([dblp_hit(changed, A3, venue="TOIS", kind="Journal Articles",
                                        doi="10.5555/s12")]),
             s2_arxiv=s2_paper(changed, A3[:2], arxiv_id="2101.00012", doi="10.5555/s12",
                               venue="ACM Trans. Inf. Syst.", types=("JournalArticle",)),
             skip=("s2_search",))

    t = "Mismatched Identifiers in Citation Graphs"
    scenario(root, 13, "doi_mismatch", t, A2, doi="10.5555/s13",
             dblp=dblp_result([dblp_hit(t, A2, doi="10.5555/other13")]),
             s2_arxiv=s2_paper(t, A2, arxiv_id="2101.00013", doi="10.9999/wrong13"),
             skip=("s2_doi", "s2_search"))

    t = "Self Supervised Depth from Monocular Video"
    scenario(root, 14, "self_match", t, A3,
             dblp=dblp_result([dblp_hit(t, A3, venue="CoRR", kind="Informal and Other Publications",
                                        key="journals/corr/abs-2101-00014",
                                        ee="https://arxiv.org/abs/2101.00014",
                                        volume="abs/2101.00014")]),
             s2_arxiv=s2_paper(t, A3, arxiv_id="2101.00014", venue="arXiv.org",
                               journal={"name": "ArXiv", "volume": "abs/2101.00014"},
                               types=("JournalArticle",)),
             oa_search=oa_result([oa_work(t, A3, doi="10.48550/arxiv.2101.00014",
                                          arxiv_id="2101.00014",
                                          source="arXiv (Cornell University)",
                                          source_type="repository", work_id="W14")]),
             skip=("s2_search",))

    t = "Typed Holes in Program Synthesis"
    scenario(root, 15, "missing_type_venue", t, A2,
             dblp=dblp_result([dblp_hit(t, A2, venue="POPL", doi="10.5555/s15")]),
             s2_arxiv=s2_paper(t, A2, arxiv_id="2101.00015", doi="10.5555/s15", venue="",
                               types=None),
             skip=("s2_search",))

    t = "Benchmarking Vision Language Models"
    scenario(root, 16, "author_ratio", t, A4,
             dblp=dblp_result([dblp_hit(t, ["Fay Wong", "Gus Berg", "Jon Doe", "Kim Lee"],
                                        doi="10.5555/d16")]),
             crossref=crossref_result([csl_item(t, A4, "10.5555/s16")]))

    t = "Diffusion Models for Protein Design"
    scenario(root, 17, "s2_openalex", t, A3,
             s2_arxiv=s2_paper(t, A3, arxiv_id="2101.00017", doi="10.5555/s17", venue="Nature Methods",
                               types=("JournalArticle",)),
             oa_search=oa_result([oa_work(t, A3, doi="10.5555/s17", arxiv_id="2101.00017",
                                          source="Nature Methods", work_id="W17")]),
             skip=("s2_search",))

    t = "Scalable Gaussian Processes via Sketching"
    scenario(root, 18, "dblp_two_crossref", t, A2,
             dblp=dblp_result([
                 dblp_hit(t, A2, venue="AISTATS", year=2021, doi="10.5555/s18a"),
                 dblp_hit(t, A2, venue="J. Mach. Learn. Res.", kind="Journal Articles", year=2022,
                          doi="10.5555/s18b", key="journals/jmlr/s18b"),
                 dblp_hit(t, A2, venue="CoRR", kind="Informal and Other Publications",
                          key="journals/corr/abs-2101-00018",
                          ee="https://arxiv.org/abs/2101.00018"),
             ]),
             crossref=crossref_result([csl_item(t, A2, "10.5555/s18b", container="JMLR", year=2022)]))

    t = "Über die Stabilität neuronaler Netze"
    accented = ["José García", "Zoë Müller", "Łukasz Nowak"]
    plain = ["Jose Garcia", "Zoe Muller", "Lukasz Nowak"]
    scenario(root, 19, "diacritics", t, accented,
             dblp=dblp_result([dblp_hit(t, plain, venue="GI Jahrestagung", doi="10.5555/s19")]),
             crossref=crossref_result([csl_item(t, accented, "10.5555/s19",
                                                kind="proceedings-article",
                                                container="Proc. GI")]))

    t = "Streaming Algorithms for Heavy Hitters"
    scenario(root, 20, "dblp_openalex_dedup", t, A3,
             dblp=dblp_result([
                 dblp_hit(t, A3, venue="SODA", doi="10.5555/s20", key="conf/soda/s20"),
                 dblp_hit(t, A3, venue="SODA", doi="10.5555/S20", key="conf/soda/s20-dup"),
             ]),
             oa_search=oa_result([oa_work(t, A3, doi="10.5555/s20", source="SODA",
                                          source_type="conference", work_id="W20")]))

    # An id arXiv does not know.
    Fixtures(root / "x_arxiv_missing").add("arxiv", ARXIV + "2101.00099", arxiv_empty("2101.00099"))
    # A preprint whose providers all fail: only the arXiv response is recorded.
    Fixtures(root / "x_providers_down").add(
        "arxiv", ARXIV + "2101.00098",
        arxiv_feed("2101.00098", "Nobody Answers Here", ["Ann Smith"], "2021-01-30"))


# ---------------------------------------------------------------- cascade

def build_cascade(root):
    T = "Cascade Probe Title"
    A = ["Ann Smith", "Bo Chen"]
    ID = "2102.00001"
    DOI = "10.5555/cascade"

    f = Fixtures(root / "c01_dblp_five_hits")
    f.add("dblp", dblp_url(T), dblp_result([dblp_hit(f"{T} {i}", A, doi=f"10.5555/c01{i}")
                                            for i in range(5)]))
    f = Fixtures(root / "c02_dblp_no_hits")
    f.add("dblp", dblp_url(T + " Empty"), DBLP_MISS)
    f = Fixtures(root / "c03_dblp_malformed")
    f.add("dblp", dblp_url(T + " Broken"), "<html>502 Bad Gateway</html>")

    f = Fixtures(root / "c04_crosscite_hit")
    f.add("crosscite", DOI_ORG.format(DOI), csl_item(T, A, DOI, as_list=False))
    f = Fixtures(root / "c05_crosscite_404_search")
    f.add("crosscite", DOI_ORG.format(DOI + "404"), "DOI Not Found", status=404)
    f.add("crossref", crossref_url(T + " Fallback"),
          crossref_result([csl_item(T + " Fallback", A, "10.5555/c05")]))
    f = Fixtures(root / "c06_crossref_ten")
    f.add("crossref", crossref_url(T + " Ten"),
          crossref_result([csl_item(f"{T} Ten {i}", A, f"10.5555/c06{i}") for i in range(10)]))
    f = Fixtures(root / "c07_crosscite_malformed")
    f.add("crosscite", DOI_ORG.format(DOI + "bad"), "<html>oops</html>")
    f.add("crossref", crossref_url(T + " After Error"), CROSSREF_MISS)

    f = Fixtures(root / "c08_s2_arxiv_hit")
    f.add("s2_arxiv", s2_arxiv_url(ID), s2_paper(T, A, arxiv_id=ID))
    f = Fixtures(root / "c09_s2_doi_hit")
    f.add("s2_arxiv", s2_arxiv_url("2102.00009"), s2_missing("ARXIV:2102.00009"), status=404)
    f.add("s2_doi", s2_doi_url(DOI + "s2"), s2_paper(T, A, doi=DOI + "s2"))
    f = Fixtures(root / "c10_s2_all_empty")
    f.add("s2_arxiv", s2_arxiv_url("2102.00010"), s2_missing("ARXIV:2102.00010"), status=404)
    f.add("s2_doi", s2_doi_url(DOI + "none"), s2_missing("DOI"), status=404)
    f.add("s2_search", s2_search_url(T + " Nothing"), S2_SEARCH_MISS)
    f = Fixtures(root / "c11_s2_search")
    f.add("s2_arxiv", s2_arxiv_url("2102.00011"), s2_missing("ARXIV:2102.00011"), status=404)
    f.add("s2_search", s2_search_url(T + " Searched"),
          s2_search([s2_paper(T + " Searched", A), s2_paper(T + " Other", A)]))
    f = Fixtures(root / "c12_s2_rate_limited")
    f.add("s2_arxiv", s2_arxiv_url("2102.00012"), '{"message": "Too Many Requests"}', status=429)
    f.add("s2_search", s2_search_url(T + " Limited"), s2_search([s2_paper(T + " Limited", A)]))

    f = Fixtures(root / "c13_oa_doi_hit")
    f.add("oa_doi", oa_doi_url(DOI + "oa"), oa_work(T, A, doi=DOI + "oa", work_id="WC13"))
    f = Fixtures(root / "c14_oa_one_of_seven")
    works = [oa_work(f"{T} Seven {i}", A, doi=f"10.5555/c14{i}", work_id=f"WC14{i}")
             for i in range(7)]
    works[5] = oa_work(f"{T} Seven 5", A, doi="10.5555/c145", arxiv_id="2102.00014", work_id="WC145")
    f.add("oa_search", oa_search_url(T + " Seven"), oa_result(works))
    f = Fixtures(root / "c15_oa_no_links")
    f.add("oa_search", oa_search_url(T + " Unlinked"),
          oa_result([oa_work(f"{T} Unlinked {i}", A, doi=f"10.5555/c15{i}", work_id=f"WC15{i}")
                     for i in range(7)]))
    f = Fixtures(root / "c16_oa_doi_404_search")
    f.add("oa_doi", oa_doi_url(DOI + "oa404"), "", status=404)
    f.add("oa_search", oa_search_url(T + " After Miss"), OA_MISS)


# ---------------------------------------------------------------- snapshot

# (category pool, records, without publication info, total versions)
TOY_FIELDS = [
    (["cs.LG", "cs.CL", "cs.CV", "cmp-lg"], 13, 10, 19),
    (["math.CO", "math.PR", "q-alg"], 8, 5, 12),
    (["hep-th", "astro-ph.GA", "cond-mat.str-el", "quant-ph", "gr-qc", "nucl-th",
      "physics.optics", "chao-dyn"], 14, 4, 20),
    (["q-bio.GN"], 3, 2, 4),
    (["q-fin.ST"], 2, 1, 3),
    (["stat.ML", "stat.ME"], 5, 4, 7),
    (["eess.SP"], 3, 3, 3),
    (["econ.EM"], 2, 2, 4),
]


def rfc2822(year, month):
    return format_datetime(datetime(year, month, 1, 10, 0, 0, tzinfo=timezone.utc), usegmt=True)


def build_snapshot(path):
    lines = []
    serial = 0
    for cats, count, without, versions in TOY_FIELDS:
        # Versions: one each, the surplus goes to the first records.
        per_record = [1] * count
        for i in range(versions - count):
            per_record[i % count] += 1
        for i in range(count):
            serial += 1
            has_info = i >= without
            record = {
                "id": f"{2000 + serial % 20:02d}{(serial % 12) + 1:02d}.{serial:05d}"[2:],
                "submitter": "Toy",
                "authors": "A. Person",
                "title": f"Toy record {serial}",
                "comments": None,
                "journal-ref": ("J. Toy 1 (2020)" if has_info and i % 2 == 0 else None),
                "doi": (f"10.5555/toy{serial}" if has_info and i % 2 == 1 else None),
                "categories": " ".join([cats[i % len(cats)], "cs.AI"]),
                "versions": [{"version": f"v{v + 1}", "created": rfc2822(2019, (v % 12) + 1)}
                             for v in range(per_record[i])],
                "update_date": "2020-01-01",
            }
            lines.append(json.dumps(record))
    lines.insert(17, "{this line is not json")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def main():
    for sub in ("corpus", "cascade"):
        shutil.rmtree(HERE / sub, ignore_errors=True)
    build_corpus(HERE / "corpus")
    build_cascade(HERE / "cascade")
    build_snapshot(HERE / "snapshot_toy.jsonl")


if __name__ == "__main__":
    main()
