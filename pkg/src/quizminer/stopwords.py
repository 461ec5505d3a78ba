"""Fixed stopword list used for question filtering.

The list is frozen and versioned with the package so that query
construction is identical across runs and machines.  It holds roughly 300
common English function words: articles, determiners, pronouns,
prepositions, conjunctions, auxiliaries, wh-words, frequent adverbs, and
the single letters left behind by contraction splitting.  Answer choices
are never filtered against this list.
"""

from __future__ import annotations

_WORDS = """
a about above across after again against ago all almost along already also
although always am amid among an and another any anybody anyone anything
anywhere are aren around as at away b be became because become becomes been
before behind being below beneath beside besides between beyond both but by c
can cannot could couldn d despite did didn do does doesn doing don done down
during e each either else elsewhere enough even ever every everybody everyone
everything everywhere except f far few for from further g get gets got h had
hadn has hasn have haven having he hence her here hers herself him himself his
how however i if in indeed inside instead into is isn it its itself j just k l
least less let lets like little ll m many may maybe me might mightn mine more
moreover most much must mustn my myself n near nearly neither never
nevertheless next no nobody none noone nor not nothing now nowhere o of off
often on once one ones only onto or other others otherwise ought our ours
ourselves out outside over own p past per perhaps q quite r rather re really s
same seldom several shall shan she should shouldn since so some somebody
somehow someone something sometimes somewhat somewhere soon still such t than
that the their theirs them themselves then there therefore these they this
those though through throughout thus till to too toward towards u under
underneath unless until unto up upon us v ve very via w was wasn we were weren
what whatever when whenever where whereas wherever whether which whichever
while who whoever whom whose why will with within without won would wouldn x y
yes yet you your yours yourself yourselves z
""".split()

STOPWORDS: frozenset[str] = frozenset(_WORDS)
