// SPDX-License-Identifier: Apache-2.0
#include <mango/html_text.hpp>

#include <gtest/gtest.h>

namespace mango
{
namespace
{

    TEST(HtmlToText, StripsMarkupScriptsAndCollapsesWhitespace)
    {
        auto const html = "<html><head><style>p{}</style><script>var x = '<p>';</script></head>"
                          "<body><h1>Title</h1>\n<p>First&nbsp;para &amp; more</p><!-- hidden --><div>Next</div></body></html>";
        EXPECT_EQ(html_to_text(html), "Title First para & more Next");
    }

    TEST(HtmlToText, DecodesNumericEntities)
    {
        EXPECT_EQ(html_to_text("caf&#233; &#x41;BC &lt;tag&gt; &bogus; a&b"), "caf\xC3\xA9 ABC <tag> &bogus; a&b");
    }

    TEST(HtmlToText, TruncatesOnCharacterBoundary)
    {
        auto const text = html_to_text("<p>\xC3\xA9\xC3\xA9\xC3\xA9</p>", 5);
        EXPECT_EQ(text, "\xC3\xA9\xC3\xA9");
    }

    TEST(TruncateUtf8, KeepsShortTextAndCutsAtBoundary)
    {
        EXPECT_EQ(truncate_utf8("hello", 10), "hello");
        EXPECT_EQ(truncate_utf8("hello", 3), "hel");
        EXPECT_EQ(truncate_utf8("a\xE2\x82\xAC", 3), "a");
        EXPECT_EQ(truncate_utf8("", 0), "");
    }

    TEST(ExtractAnchors, ReadsHrefAndText)
    {
        auto const anchors = extract_anchors("<a href=\"/a\">One</a> <A HREF='/b?x=1&amp;y=2'><b>Two</b></A> <a name=\"x\">skip</a> "
                                             "<a href=/c>Three</a> <abbr>no</abbr>");
        ASSERT_EQ(anchors.size(), 3u);
        EXPECT_EQ(anchors[0].href, "/a");
        EXPECT_EQ(anchors[0].text, "One");
        EXPECT_EQ(anchors[1].href, "/b?x=1&y=2");
        EXPECT_EQ(anchors[1].text, "Two");
        EXPECT_EQ(anchors[2].href, "/c");
    }

} // namespace
} // namespace mango
