"""Inverted index semantics against a brute-force scan oracle."""

from tilecast.textindex import TextIndex, TextRun, tokenize


def run(text, seq=1, x=0, y=0):
    return TextRun(text=text, x=x, y=y, w=max(1, 8 * len(text)), h=14,
                   url="https://t.test/", seq=seq)


class TestTokenize:
    def test_whitespace_and_punctuation(self):
        assert tokenize("Fuji Xerox homepage") == ["fuji", "xerox", "homepage"]
        assert tokenize("one,two;three.four") == ["one", "two", "three", "four"]
        assert tokenize("under_score") == ["under", "score"]
        assert tokenize("[REDACTED]") == ["redacted"]
        assert tokenize("") == []
        assert tokenize("  \t\n ") == []

    def test_case_folding(self):
        assert tokenize("MiXeD CaSe") == ["mixed", "case"]

    def test_digits_kept(self):
        assert tokenize("area 51 x9") == ["area", "51", "x9"]


class BruteForce:
    """Oracle: linear scan over every indexed run."""

    def __init__(self):
        self.entries = []  # (session, seq, ts, run)

    def add(self, session, seq, ts, runs):
        for r in runs:
            self.entries.append((session, seq, ts, r))

    def search(self, query):
        tokens = tokenize(query)
        if not tokens:
            return []
        out = []
        for session, seq, ts, r in self.entries:
            seq_tokens = set()
            for s2, q2, _, r2 in self.entries:
                if s2 == session and q2 == seq:
                    seq_tokens.update(tokenize(r2.text))
            if all(t in seq_tokens for t in tokens) and set(tokenize(r.text)) & set(tokens):
                out.append((session, seq, r.bbox, r.text))
        out.sort(key=lambda e: (e[0], e[1]))
        return out


class TestSearch:
    def build(self):
        index = TextIndex()
        oracle = BruteForce()
        corpus = [
            ("sess-a", 1, 0, [run("Fuji Xerox homepage"), run("weather report", x=50)]),
            ("sess-a", 5, 1000, [run("homepage news", seq=5)]),
            ("sess-b", 2, 500, [run("xerox machines", seq=2), run("fuji apples", seq=2, y=30)]),
            ("sess-b", 9, 2000, [run("unrelated words", seq=9)]),
        ]
        for session, seq, ts, runs in corpus:
            index.index_runs(session, seq, ts, runs)
            oracle.add(session, seq, ts, runs)
        return index, oracle

    def test_single_token_hit_carries_bbox(self):
        index, _ = self.build()
        hits = index.search("xerox")
        assert len(hits) == 2
        assert hits[0].session == "sess-a" and hits[0].bbox == (0, 0, 8 * 19, 14)
        assert hits[0].timestamp_ms == 0

    def test_absent_token(self):
        index, _ = self.build()
        assert index.search("zzznotpresent") == []

    def test_multiword_and_within_seq(self):
        index, oracle = self.build()
        hits = index.search("fuji homepage")
        expected = oracle.search("fuji homepage")
        assert [(h.session, h.seq, h.bbox, h.snippet) for h in hits] == expected
        # only sess-a seq 1 has both tokens at one seq
        assert {(h.session, h.seq) for h in hits} == {("sess-a", 1)}

    def test_cross_run_and_same_seq(self):
        index, oracle = self.build()
        # "xerox" and "apples" are in different runs of sess-b seq 2
        hits = index.search("xerox apples")
        expected = oracle.search("xerox apples")
        assert [(h.session, h.seq, h.bbox, h.snippet) for h in hits] == expected
        assert {(h.session, h.seq) for h in hits} == {("sess-b", 2)}
        assert len(hits) == 2

    def test_matches_oracle_on_many_queries(self):
        index, oracle = self.build()
        for query in ["fuji", "homepage", "news weather", "xerox machines",
                      "report", "fuji xerox homepage", "apples unrelated"]:
            got = [(h.session, h.seq, h.bbox, h.snippet) for h in index.search(query)]
            assert got == oracle.search(query), query

    def test_empty_query(self):
        index, _ = self.build()
        assert index.search("") == []
        assert index.search("   .,;") == []

    def test_limit(self):
        index, _ = self.build()
        assert len(index.search("xerox", limit=1)) == 1

    def test_ordering_by_session_then_seq(self):
        index, _ = self.build()
        hits = index.search("homepage")
        assert [(h.session, h.seq) for h in hits] == [("sess-a", 1), ("sess-a", 5)]


class TestRetrievability:
    def test_every_token_of_every_run_findable(self):
        index = TextIndex()
        runs = [run("alpha beta gamma"), run("Delta epsilon, zeta!", x=10)]
        index.index_runs("s1", 3, 750, runs)
        for r in runs:
            for token in tokenize(r.text):
                hits = index.search(token)
                assert any(h.snippet == r.text and h.seq == 3 for h in hits), token

    def test_empty_run_list(self):
        index = TextIndex()
        assert index.index_runs("s1", 1, 0, []) == 0
        assert index.sessions() == []


class TestPersistence:
    def test_dump_and_load_round_trip(self, tmp_path):
        index = TextIndex()
        index.index_runs("s1", 1, 0, [run("persisted words here")])
        index.index_runs("s1", 4, 900, [run("later tick", seq=4)])
        path = tmp_path / "tokens.jsonl"
        index.dump_session("s1", path)

        fresh = TextIndex()
        assert fresh.load_session("s1", path) == 2
        for query in ["persisted", "later"]:
            got = [(h.seq, h.timestamp_ms, h.snippet) for h in fresh.search(query)]
            want = [(h.seq, h.timestamp_ms, h.snippet) for h in index.search(query)]
            assert got == want
