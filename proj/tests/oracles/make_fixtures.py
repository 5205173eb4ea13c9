#!/usr/bin/env python3
"""Writes the hand-built XML fixture corpus and the field values a parser must recover from it.

Expected values are stated here directly, next to the markup that carries them,
so the C++ parser is checked against the fixture author rather than itself.
"""
import json
import pathlib

ROOT = pathlib.Path(__file__).resolve().parents[1] / "data"

DECL = '<?xml version="1.0" encoding="UTF-8"?>\n'


def doctype(root):
    return f'<!DOCTYPE {root} SYSTEM "{root}-v45-2014-04-03.dtd" [ ]>\n'


def cpc(section, cls, subclass, group, subgroup="00"):
    return (
        "<classification-cpc><cpc-version-indicator><date>20130101</date></cpc-version-indicator>"
        f"<section>{section}</section><class>{cls}</class><subclass>{subclass}</subclass>"
        f"<main-group>{group}</main-group><subgroup>{subgroup}</subgroup>"
        "<classification-value>I</classification-value></classification-cpc>"
    )


def inventor(first, last, seq):
    return (
        f'<inventor sequence="{seq:03d}" designation="us-only"><addressbook>'
        f"<last-name>{last}</last-name><first-name>{first}</first-name>"
        "<address><city>Armonk</city><state>NY</state><country>US</country></address>"
        "</addressbook></inventor>"
    )


def applicant_inventor(first, last, seq):
    return (
        f'<applicant sequence="{seq:03d}" app-type="applicant-inventor" designation="us-only"><addressbook>'
        f"<last-name>{last}</last-name><first-name>{first}</first-name>"
        "<address><city>Austin</city><state>TX</state><country>US</country></address>"
        "</addressbook><nationality><country>US</country></nationality></applicant>"
    )


def assignee(org):
    return f"<assignee><addressbook><orgname>{org}</orgname><role>02</role></addressbook></assignee>"


def citation(n):
    return (
        f'<us-citation><patcit num="{n:05d}"><document-id><country>US</country>'
        f"<doc-number>{5000000 + n}</doc-number><kind>A</kind><date>19990101</date></document-id></patcit>"
        "<category>cited by examiner</category></us-citation>"
    )


def claim(num, body):
    return f'<claim id="CLM-{num:05d}" num="{num:05d}"><claim-text>{body}</claim-text></claim>'


def document(root, *, number, kind, pub_date, app_number, filing, title, cpcs="", parties="",
             citations="", abstract="", description="", claims=None, extra=""):
    biblio = "us-bibliographic-data-grant" if root == "us-patent-grant" else "us-bibliographic-data-application"
    claims_xml = "" if claims is None else f'<claims id="claims">{"".join(claims)}</claims>\n'
    return (
        DECL + doctype(root)
        + f'<{root} lang="EN" dtd-version="v4.5" file="US{number}-{pub_date}.XML" status="PRODUCTION" '
        f'id="{root}" country="US" date-produced="{pub_date}" date-publ="{pub_date}">\n'
        f"<{biblio}>\n"
        f"<publication-reference><document-id><country>US</country><doc-number>{number}</doc-number>"
        f"<kind>{kind}</kind><date>{pub_date}</date></document-id></publication-reference>\n"
        f'<application-reference appl-type="utility"><document-id><country>US</country>'
        f"<doc-number>{app_number}</doc-number><date>{filing}</date></document-id></application-reference>\n"
        + (f"<classifications-cpc><main-cpc>{cpcs}</main-cpc></classifications-cpc>\n" if cpcs else "")
        + f'<invention-title id="d2e53">{title}</invention-title>\n'
        + (f"<us-references-cited>{citations}</us-references-cited>\n" if citations else "")
        + extra
        + (f"<us-parties>{parties}</us-parties>\n" if parties else "")
        + f"</{biblio}>\n"
        + (f'<abstract id="abstract">{abstract}</abstract>\n' if abstract else "")
        + (f'<description id="description">{description}</description>\n' if description else "")
        + claims_xml
        + f"</{root}>\n"
    )


def grant(**kw):
    return document("us-patent-grant", **kw)


def application(**kw):
    return document("us-patent-application", **kw)


# ---------------------------------------------------------------- fixture corpus

g_cache = grant(
    number="07654321", kind="B2", pub_date="20180615", app_number="14634567", filing="20150301",
    title="Method for  caching\n query plans",
    cpcs=cpc("G", "06", "F", "16", "2453") + cpc("G", "06", "F", "16", "24") + cpc("H", "04", "L", "67"),
    citations=citation(1) + citation(2),
    parties="<inventors>" + inventor("Jane", "Doe", 1) + inventor("John Q.", "Smith", 2) + "</inventors>"
    + "<assignees>" + assignee("International Business Machines Corporation") + "</assignees>",
    abstract="<p>A query plan cache keyed by   normalized SQL &amp; bind\n\tshapes.</p>",
    description='<heading id="h-1">BACKGROUND</heading><p id="p-1">Databases re-plan queries.</p>'
    '<p id="p-2">The cache avoids <i>re</i>planning.</p>',
    claims=[
        claim(1, "1. A method comprising: receiving a query; and <b>looking up</b> a cached plan."),
        claim(2, "2. The method of claim 1, wherein the cache is bounded."),
        claim(3, "3. A system comprising a processor configured to cache query plans."),
    ],
)
g_cache_expected = {
    "doc_number": "7654321", "doc_kind": "Grant", "kind_code": "B2",
    "title": "Method for caching query plans",
    "abstract_text": "A query plan cache keyed by normalized SQL & bind shapes.",
    "claims": [
        {"number": 1, "text": "1. A method comprising: receiving a query; and looking up a cached plan.", "is_independent": True},
        {"number": 2, "text": "2. The method of claim 1, wherein the cache is bounded.", "is_independent": False},
        {"number": 3, "text": "3. A system comprising a processor configured to cache query plans.", "is_independent": True},
    ],
    "description_text": "BACKGROUND Databases re-plan queries. The cache avoids replanning.",
    "filing_date": "2015-03-01", "publication_date": "2018-06-15", "grant_date": "2018-06-15",
    "inventors": [{"first": "Jane", "last": "Doe"}, {"first": "John Q.", "last": "Smith"}],
    "assignees": ["International Business Machines Corporation"],
    "cpc_codes": ["G06F16", "H04L67"],
    "backward_citation_count": 2,
}

g_router = grant(
    number="10123456", kind="B1", pub_date="20190205", app_number="15206001", filing="20160710",
    title="Packet router with adaptive queues",
    cpcs=cpc("H", "04", "L", "29", "06"),
    parties="<us-applicants>" + applicant_inventor("Ana", "Lopez", 1) + "</us-applicants>"
    + "<assignees>" + assignee("ACME, Inc.") + "</assignees>",
    abstract="<p>Queues resize under load.</p>",
    description="<p>Routers drop packets when queues overflow.</p>",
    claims=[
        claim(1, "1. A router comprising adaptive queues."),
        claim(2, "2. The router as recited in claim 1 wherein the queues are per-flow."),
    ],
)
g_router_expected = {
    "doc_number": "10123456", "doc_kind": "Grant", "kind_code": "B1",
    "title": "Packet router with adaptive queues",
    "abstract_text": "Queues resize under load.",
    "claims": [
        {"number": 1, "text": "1. A router comprising adaptive queues.", "is_independent": True},
        {"number": 2, "text": "2. The router as recited in claim 1 wherein the queues are per-flow.", "is_independent": False},
    ],
    "description_text": "Routers drop packets when queues overflow.",
    "filing_date": "2016-07-10", "publication_date": "2019-02-05", "grant_date": "2019-02-05",
    "inventors": [{"first": "Ana", "last": "Lopez"}],
    "assignees": ["ACME, Inc."],
    "cpc_codes": ["H04L29"],
    "backward_citation_count": 0,
}

a_sensor = application(
    number="20170123456", kind="A1", pub_date="20170504", app_number="15007001", filing="20160115",
    title="Low-power humidity sensor",
    cpcs=cpc("G", "01", "N", "27", "22"),
    parties="<inventors>" + inventor("Wei", "Zhang", 1) + "</inventors>",
    abstract="<p>A capacitive sensor that sleeps between samples.</p>",
    claims=[
        claim(1, "1. A sensor comprising a capacitive element."),
        claim(2, "2. The sensor of claims 1, further comprising a timer."),
    ],
)
a_sensor_expected = {
    "doc_number": "20170123456", "doc_kind": "Application", "kind_code": "A1",
    "title": "Low-power humidity sensor",
    "abstract_text": "A capacitive sensor that sleeps between samples.",
    "claims": [
        {"number": 1, "text": "1. A sensor comprising a capacitive element.", "is_independent": True},
        {"number": 2, "text": "2. The sensor of claims 1, further comprising a timer.", "is_independent": False},
    ],
    "description_text": "",
    "filing_date": "2016-01-15", "publication_date": "2017-05-04",
    "inventors": [{"first": "Wei", "last": "Zhang"}],
    "assignees": [],
    "cpc_codes": ["G01N27"],
    "backward_citation_count": 0,
}

g_battery = grant(
    number="09876543", kind="B2", pub_date="20160301", app_number="13683001", filing="20121120",
    title="Battery <sub>cell</sub> balancing",
    cpcs=cpc("H", "02", "J", "7", "0016"),
    citations=citation(3),
    parties="<inventors>" + inventor("Olu", "Adeyemi", 1) + "</inventors>"
    + "<assignees>" + assignee("Samsung Electronics Co., Ltd.") + "</assignees>",
    extra='<us-field-of-classification-search><classification-national><country>US</country>'
    "<main-classification>320/116</main-classification></classification-national>"
    "</us-field-of-classification-search>\n<number-of-claims>1</number-of-claims>\n",
    abstract="<p>Cells are balanced <![CDATA[by <shunting> charge]]>.</p>",
    description="<p>Lithium cells drift apart.</p><unknown-block><p>Ignored markup is kept as text.</p></unknown-block>",
    claims=[claim(1, "1. A balancing circuit coupled to cells.")],
)
g_battery_expected = {
    "doc_number": "9876543", "doc_kind": "Grant", "kind_code": "B2",
    "title": "Battery cell balancing",
    "abstract_text": "Cells are balanced by <shunting> charge.",
    "claims": [{"number": 1, "text": "1. A balancing circuit coupled to cells.", "is_independent": True}],
    "description_text": "Lithium cells drift apart. Ignored markup is kept as text.",
    "filing_date": "2012-11-20", "publication_date": "2016-03-01", "grant_date": "2016-03-01",
    "inventors": [{"first": "Olu", "last": "Adeyemi"}],
    "assignees": ["Samsung Electronics Co., Ltd."],
    "cpc_codes": ["H02J7"],
    "backward_citation_count": 1,
}

a_claimless = application(
    number="20180004321", kind="A1", pub_date="20180104", app_number="15640001", filing="20170630",
    title="Drone docking station",
    parties="<inventors>" + inventor("Mara", "Quinn", 1) + inventor("Ravi", "Patel", 2) + "</inventors>",
    abstract="<p>A dock that charges drones.</p>",
)
a_claimless_expected = {
    "doc_number": "20180004321", "doc_kind": "Application", "kind_code": "A1",
    "title": "Drone docking station",
    "abstract_text": "A dock that charges drones.",
    "claims": [],
    "description_text": "",
    "filing_date": "2017-06-30", "publication_date": "2018-01-04",
    "inventors": [{"first": "Mara", "last": "Quinn"}, {"first": "Ravi", "last": "Patel"}],
    "assignees": [],
    "cpc_codes": [],
    "backward_citation_count": 0,
}

g_inverted = grant(
    number="08111111", kind="B2", pub_date="20140101", app_number="14000001", filing="20150301",
    title="Time travel", parties="<inventors>" + inventor("Emmett", "Brown", 1) + "</inventors>",
    claims=[claim(1, "1. A flux capacitor.")],
)

unknown_root = (
    DECL + '<!DOCTYPE us-sequence-listing SYSTEM "us-sequence-listing.dtd" [ ]>\n'
    '<us-sequence-listing lang="EN" date-publ="20180615"><sequence-data>ACGT</sequence-data></us-sequence-listing>\n'
)

g_no_number = grant(
    number="", kind="B2", pub_date="20180615", app_number="14000002", filing="20150301",
    title="Numberless", claims=[claim(1, "1. A thing.")],
)

g_stray = grant(
    number="11000001", kind="B2", pub_date="20200714", app_number="15860001", filing="20180102",
    title="Resilient decoder",
    cpcs=cpc("H", "03", "M", "13", "11"),
    parties="<inventors>" + inventor("Lena", "Müller", 1) + "</inventors>"
    + "<assignees>" + assignee("International Business Machines Corp.") + "</assignees>",
    abstract="<p>Decodes STRAY despite noise.</p>",
    claims=[claim(1, "1. A decoder."), claim(2, "2. The decoder according to claim 1.")],
)
g_stray_expected = {
    "doc_number": "11000001", "doc_kind": "Grant", "kind_code": "B2",
    "title": "Resilient decoder",
    "abstract_text": "Decodes " + b"\xff\xfe".decode("utf-8", "replace") + " despite noise.",
    "claims": [
        {"number": 1, "text": "1. A decoder.", "is_independent": True},
        {"number": 2, "text": "2. The decoder according to claim 1.", "is_independent": False},
    ],
    "description_text": "",
    "filing_date": "2018-01-02", "publication_date": "2020-07-14", "grant_date": "2020-07-14",
    "inventors": [{"first": "Lena", "last": "Müller"}],
    "assignees": ["International Business Machines Corp."],
    "cpc_codes": ["H03M13"],
    "backward_citation_count": 0,
}

a_tail = application(
    number="20190300001", kind="A1", pub_date="20190926", app_number="16218001", filing="20181212",
    title="Edge inference scheduler",
    cpcs=cpc("G", "06", "N", "3", "063"),
    parties="<inventors>" + inventor("Jane", "Doe", 1) + "</inventors>"
    + "<assignees>" + assignee("IBM") + "</assignees>",
    abstract="<p>Schedules models onto edge devices.</p>",
    claims=[claim(1, "1. A scheduler.")],
)
a_tail_expected = {
    "doc_number": "20190300001", "doc_kind": "Application", "kind_code": "A1",
    "title": "Edge inference scheduler",
    "abstract_text": "Schedules models onto edge devices.",
    "claims": [{"number": 1, "text": "1. A scheduler.", "is_independent": True}],
    "description_text": "",
    "filing_date": "2018-12-12", "publication_date": "2019-09-26",
    "inventors": [{"first": "Jane", "last": "Doe"}],
    "assignees": ["IBM"],
    "cpc_codes": ["G06N3"],
    "backward_citation_count": 0,
}

g_truncated_full = grant(
    number="11000002", kind="B2", pub_date="20200721", app_number="15860002", filing="20180103",
    title="Interrupted transmission", claims=[claim(1, "1. A transmitter.")],
)
g_truncated = g_truncated_full[: g_truncated_full.index("<invention-title") + 20]

files = {
    "01_grants.xml": [(g_cache, g_cache_expected), (g_router, g_router_expected), (a_sensor, a_sensor_expected)],
    "02_mixed.xml": [
        (g_battery, g_battery_expected),
        (a_claimless, a_claimless_expected),
        (g_inverted, "invalid date ordering"),
        (unknown_root, "unsupported document type"),
        (g_no_number, "missing required field"),
    ],
    "03_tail.xml": [(g_stray, g_stray_expected), (a_tail, a_tail_expected), (g_truncated, "truncated document")],
}

expected = {"files_processed": len(files), "documents": [], "quarantine": []}
for name, docs in files.items():
    data = b""
    for xml, outcome in docs:
        chunk = xml.encode("utf-8").replace(b"STRAY", b"\xff\xfe")
        if isinstance(outcome, str):
            expected["quarantine"].append({"source_file": name, "byte_offset": len(data), "reason": outcome})
        else:
            expected["documents"].append(outcome)
        data += chunk
    (ROOT / "fixtures" / name).write_bytes(data)
expected["documents_parsed"] = len(expected["documents"])
expected["documents_quarantined"] = len(expected["quarantine"])
(ROOT / "fixtures_expected.json").write_text(json.dumps(expected, indent=1, ensure_ascii=False) + "\n")

# Two-file directory: 3 grants + 2 applications, one of the grants malformed.
pair = {
    "a.xml": g_cache + a_sensor,
    "b.xml": g_router + a_tail + g_inverted,
}
for name, text in pair.items():
    (ROOT / "ingest_pair" / name).write_text(text)
