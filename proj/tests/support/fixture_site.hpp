#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "sitekeeper/url.hpp"
#include "support/scripted.hpp"

namespace sitekeeper::test {

// The 12-node micro-site: a declared adjacency from which both the HTML
// fixture and the independent closure oracle derive. 6 pages, 3 wp-content
// media, 2 css/js resources, 1 external link; every page links back to the
// seed.
struct FixtureSite {
    std::string origin; // e.g. "https://peisctehran.test"
    std::map<std::string, std::vector<std::string>> links; // page path -> raw hrefs

    static FixtureSite standard(std::string origin) {
        FixtureSite site;
        site.origin = std::move(origin);
        site.links["/"] = {
            "/about",
            "/news",
            "/gallery",
            "/contact",
            "/history",
            "/wp-content/uploads/photo1.jpg",
            "/wp-content/uploads/photo2.png",
            "/wp-content/uploads/brochure.pdf",
            "/theme/style.css",
            "/js/app.js",
            "https://other-site.example/page",
        };
        site.links["/about"] = {"/"};
        site.links["/news"] = {"/"};
        site.links["/gallery"] = {"/"};
        site.links["/contact"] = {"/"};
        site.links["/history"] = {"/"};
        return site;
    }

    // Mixed quoting on purpose: the extractor is a quoted-string scan.
    std::string html_for(const std::string& path) const {
        std::string html = "<html><head><title>" + path + "</title></head><body>\n";
        const auto it = links.find(path);
        if (it != links.end()) {
            bool single = false;
            for (const auto& href : it->second) {
                const char q = single ? '\'' : '"';
                if (href.find("/wp-content/") != std::string::npos) {
                    html += std::string("<img src=") + q + href + q + ">\n";
                } else {
                    html += std::string("<a href=") + q + href + q + ">link</a>\n";
                }
                single = !single;
            }
        }
        html += "</body></html>\n";
        return html;
    }

    void install(MapFetcher& fetcher) const {
        for (const auto& [path, hrefs] : links) fetcher.add_page(origin + path, html_for(path));
    }

    // Brute-force transitive closure over the declared adjacency; never
    // parses HTML or touches the crawl queue. Page links reachable from "/"
    // plus media links on reachable pages, minus excluded and external.
    std::set<std::string> oracle_targets(const CrawlPolicy& policy) const {
        const auto base = parse_absolute(origin + "/");
        std::set<std::string> reachable_pages;
        std::set<std::string> media;

        std::vector<std::string> stack = {"/"};
        while (!stack.empty()) {
            const std::string path = stack.back();
            stack.pop_back();
            const auto page_url = normalize(path, *base);
            if (!page_url || !reachable_pages.insert(page_url->str()).second) continue;
            const auto it = links.find(path);
            if (it == links.end()) continue;
            for (const auto& raw : it->second) {
                const auto url = normalize(raw, *page_url);
                if (!url) continue;
                switch (classify(*url, policy)) {
                case LinkClass::Page:
                    if (!reachable_pages.count(url->str())) stack.push_back(url->path);
                    break;
                case LinkClass::Media: media.insert(url->str()); break;
                default: break;
                }
            }
        }
        std::set<std::string> targets = reachable_pages;
        targets.insert(media.begin(), media.end());
        return targets;
    }

    CrawlPolicy policy() const {
        CrawlPolicy p;
        auto seed = parse_absolute(origin + "/");
        p.internal_hosts = {seed->host};
        p.politeness_delay = Duration::zero();
        return p;
    }
};

} // namespace sitekeeper::test
