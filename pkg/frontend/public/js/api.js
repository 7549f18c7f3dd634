// Thin fetch wrappers over the service endpoints.
export async function fetchDatabases() {
    const resp = await fetch("/api/databases");
    if (!resp.ok)
        throw new Error(`databases: HTTP ${resp.status}`);
    return resp.json();
}
export async function fetchExamples(db, n = 6) {
    const resp = await fetch(`/api/corpus?db=${encodeURIComponent(db)}&n=${n}`);
    if (!resp.ok)
        throw new Error(`corpus: HTTP ${resp.status}`);
    return resp.json();
}
export async function submitQuery(db, nlq, optimize) {
    const resp = await fetch("/api/query", {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ db, nlq, optimize }),
    });
    if (!resp.ok)
        throw new Error(`query: HTTP ${resp.status}`);
    return resp.json();
}
