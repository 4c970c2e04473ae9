#include <doctest.h>

#include "sitekeeper/random.hpp"
#include "sitekeeper/url.hpp"

using namespace sitekeeper;

namespace {

NormalizedUrl abs_url(const std::string& s) {
    auto url = parse_absolute(s);
    REQUIRE(url.has_value());
    return *url;
}

CrawlPolicy policy_for(std::initializer_list<std::string> hosts) {
    CrawlPolicy policy;
    policy.internal_hosts = hosts;
    return policy;
}

} // namespace

TEST_CASE("normalize resolves relative references against the base") {
    const auto base = abs_url("https://peisctehran.com/");
    const auto url = normalize("/about", base);
    REQUIRE(url.has_value());
    CHECK(url->str() == "https://peisctehran.com/about");

    SUBCASE("relative path merge") {
        const auto page = abs_url("https://peisctehran.com/news/2026/post.html");
        CHECK(normalize("photo.jpg", page)->str() ==
              "https://peisctehran.com/news/2026/photo.jpg");
        CHECK(normalize("../index.html", page)->str() ==
              "https://peisctehran.com/news/index.html");
    }
    SUBCASE("query-only reference") {
        const auto page = abs_url("https://peisctehran.com/search");
        CHECK(normalize("?q=history", page)->str() == "https://peisctehran.com/search?q=history");
    }
    SUBCASE("scheme-relative inherits the base scheme") {
        CHECK(normalize("//cdn.peisctehran.com/a.png", base)->str() ==
              "https://cdn.peisctehran.com/a.png");
        const auto http_base = abs_url("http://peisctehran.com/");
        CHECK(normalize("//cdn.peisctehran.com/a.png", http_base)->scheme == "http");
    }
}

TEST_CASE("normalize strips fragments everywhere") {
    const auto base = abs_url("https://peisctehran.com/");
    CHECK(normalize("https://peisctehran.com/news#top", base)->str() ==
          "https://peisctehran.com/news");
    CHECK(normalize("/news#a#b", base)->str() == "https://peisctehran.com/news");
    // fragment-only reference resolves to the base document
    CHECK(normalize("#section", base)->str() == base.str());
}

TEST_CASE("normalize rejects non-fetchable schemes") {
    const auto base = abs_url("https://peisctehran.com/");
    UrlError error = UrlError::None;
    CHECK_FALSE(normalize("javascript:void(0)", base, &error).has_value());
    CHECK(error == UrlError::UnsupportedScheme);
    CHECK_FALSE(normalize("mailto:info@peisctehran.com", base, &error).has_value());
    CHECK(error == UrlError::UnsupportedScheme);
    CHECK_FALSE(normalize("tel:+98123", base, &error).has_value());
    CHECK(error == UrlError::UnsupportedScheme);
    CHECK_FALSE(normalize("data:image/png;base64,AAAA", base, &error).has_value());
    CHECK(error == UrlError::UnsupportedScheme);
}

TEST_CASE("normalize flags malformed input") {
    const auto base = abs_url("https://peisctehran.com/");
    UrlError error = UrlError::None;
    CHECK_FALSE(normalize("http://", base, &error).has_value());
    CHECK(error == UrlError::MalformedUrl);
    CHECK_FALSE(normalize("https://bad host/", base, &error).has_value());
    CHECK(error == UrlError::MalformedUrl);
    CHECK_FALSE(normalize("http:relative-ish", base, &error).has_value());
    CHECK(error == UrlError::MalformedUrl);
    CHECK_FALSE(parse_absolute("/not-absolute", &error).has_value());
    CHECK(error == UrlError::MalformedUrl);
}

TEST_CASE("normalize lowercases scheme and host, removes default ports") {
    const auto base = abs_url("https://peisctehran.com/");
    CHECK(normalize("HTTPS://PEISCTEHRAN.COM/About", base)->str() ==
          "https://peisctehran.com/About"); // path case is preserved
    CHECK(normalize("https://peisctehran.com:443/x", base)->str() ==
          "https://peisctehran.com/x");
    CHECK(normalize("http://peisctehran.com:80/x", base)->str() == "http://peisctehran.com/x");
    CHECK(normalize("http://peisctehran.com:8080/x", base)->host == "peisctehran.com:8080");
}

TEST_CASE("normalize collapses dot segments and encodes stray bytes") {
    const auto base = abs_url("https://peisctehran.com/");
    CHECK(normalize("/a/./b/../c", base)->str() == "https://peisctehran.com/a/c");
    CHECK(normalize("/../../x", base)->str() == "https://peisctehran.com/x");
    CHECK(normalize("/files/a b.pdf", base)->path == "/files/a%20b.pdf");
    // existing escapes pass through untouched
    CHECK(normalize("/files/a%20b.pdf", base)->path == "/files/a%20b.pdf");
}

TEST_CASE("query strings are preserved and distinguish URLs") {
    const auto base = abs_url("https://peisctehran.com/");
    const auto with_q = normalize("/page?id=7", base);
    const auto other_q = normalize("/page?id=8", base);
    const auto plain = normalize("/page", base);
    CHECK(with_q->str() == "https://peisctehran.com/page?id=7");
    CHECK(*with_q != *other_q);
    CHECK(*with_q != *plain);
    // a bare "?" is no query at all
    CHECK(normalize("/page?", base)->str() == "https://peisctehran.com/page");
}

TEST_CASE("normalize is idempotent over rendered output") {
    const auto base = abs_url("https://peisctehran.com/dir/page.html");
    const char* samples[] = {
        "/about",          "../up",          "img/photo.jpg",    "//peisctehran.com/x",
        "/a/./b/../c?q=1", "/p#frag",        "HTTP://HOST.TLD/UP?Q=v",
        "/file name.pdf",  "/q?a=1&b=%20x",  "page.html?x=y#z",
    };
    for (const char* raw : samples) {
        const auto once = normalize(raw, base);
        REQUIRE(once.has_value());
        const auto twice = normalize(once->str(), base);
        REQUIRE(twice.has_value());
        CHECK(once->str() == twice->str());
        CHECK(*once == *twice);
    }
}

TEST_CASE("fragment invariance: normalize(s + \"#anything\") == normalize(s)") {
    const auto base = abs_url("https://peisctehran.com/dir/");
    const char* stems[] = {"/a", "x/y.html", "https://peisctehran.com/q?k=v", "//host.tld/z"};
    const char* frags[] = {"#top", "#a/b?c", "#", "#%20x"};
    for (const char* stem : stems) {
        const auto plain = normalize(stem, base);
        REQUIRE(plain.has_value());
        for (const char* frag : frags) {
            const auto fragged = normalize(std::string(stem) + frag, base);
            REQUIRE(fragged.has_value());
            CHECK(*fragged == *plain);
        }
    }
}

TEST_CASE("classify follows External > ExcludedResource > Media > Page") {
    const auto policy = policy_for({"peisctehran.com"});

    CHECK(classify(abs_url("https://peisctehran.com/wp-content/uploads/photo.jpg"), policy) ==
          LinkClass::Media);
    CHECK(classify(abs_url("https://peisctehran.com/theme/style.css"), policy) ==
          LinkClass::ExcludedResource);
    CHECK(classify(abs_url("https://other-site.example/page"), policy) == LinkClass::External);
    CHECK(classify(abs_url("https://peisctehran.com/about"), policy) == LinkClass::Page);

    SUBCASE("precedence: external beats everything") {
        CHECK(classify(abs_url("https://other.example/wp-content/a.jpg"), policy) ==
              LinkClass::External);
        CHECK(classify(abs_url("https://other.example/style.css"), policy) ==
              LinkClass::External);
    }
    SUBCASE("precedence: excluded beats media markers") {
        // a .css inside wp-content is still excluded
        CHECK(classify(abs_url("https://peisctehran.com/wp-content/theme.css"), policy) ==
              LinkClass::ExcludedResource);
    }
    SUBCASE("media by extension without marker") {
        CHECK(classify(abs_url("https://peisctehran.com/files/brochure.pdf"), policy) ==
              LinkClass::Media);
        CHECK(classify(abs_url("https://peisctehran.com/files/clip.mp4"), policy) ==
              LinkClass::Media);
    }
    SUBCASE("media by marker without extension") {
        CHECK(classify(abs_url("https://peisctehran.com/wp-content/uploads/doc"), policy) ==
              LinkClass::Media);
    }
    SUBCASE("extension from the last path segment only, query ignored") {
        CHECK(classify(abs_url("https://peisctehran.com/a.css/page"), policy) == LinkClass::Page);
        CHECK(classify(abs_url("https://peisctehran.com/page?file=x.css"), policy) ==
              LinkClass::Page);
        CHECK(classify(abs_url("https://peisctehran.com/photo.JPG"), policy) == LinkClass::Media);
    }
}

TEST_CASE("classification is deterministic") {
    const auto policy = policy_for({"peisctehran.com"});
    const auto url = abs_url("https://peisctehran.com/wp-content/x.bin");
    const LinkClass first = classify(url, policy);
    for (int i = 0; i < 100; ++i) CHECK(classify(url, policy) == first);
}

TEST_CASE("every URL maps to exactly one class") {
    const auto policy = policy_for({"peisctehran.com"});
    Rng rng(11);
    const char* hosts[] = {"peisctehran.com", "www.peisctehran.com", "elsewhere.example"};
    const char* paths[] = {"/", "/a", "/wp-content/u/f.bin", "/x.css", "/x.jpg", "/d/x.js",
                           "/wp-content/y.css", "/p?q=.css"};
    for (const char* host : hosts) {
        for (const char* path : paths) {
            const auto url = abs_url(std::string("https://") + host + path);
            const LinkClass c = classify(url, policy);
            const bool internal = is_internal(url, policy);
            CHECK(internal == (c != LinkClass::External));
        }
    }
    (void)rng;
}

TEST_CASE("is_internal treats www-prefixed variants as internal") {
    const auto policy = policy_for({"pisctehran.com"});
    CHECK(is_internal(abs_url("https://www.pisctehran.com/x"), policy));
    CHECK(is_internal(abs_url("https://pisctehran.com/x"), policy));
    CHECK_FALSE(is_internal(abs_url("https://archive.org/x"), policy));

    const auto exact = policy_for({"peisctehran.com"});
    CHECK(is_internal(abs_url("https://peisctehran.com/x"), exact));

    // multiple internal hosts: old and new domain as one crawl target
    const auto both = policy_for({"pisctehran.com", "peisctehran.com"});
    CHECK(is_internal(abs_url("https://www.pisctehran.com/x"), both));
    CHECK(is_internal(abs_url("https://peisctehran.com/x"), both));
}

TEST_CASE("crawl policy validation") {
    CrawlPolicy policy;
    CHECK_THROWS_AS(policy.validate(), std::invalid_argument); // no internal hosts
    policy.internal_hosts = {"a.example"};
    CHECK_NOTHROW(policy.validate());
    policy.excluded_extensions.insert("pdf"); // collides with media
    CHECK_THROWS_AS(policy.validate(), std::invalid_argument);
}
