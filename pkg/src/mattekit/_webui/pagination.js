/** Offset-based pagination mirroring the server's offset/limit API. */
export function pageRequest(pageIndex, pageSize) {
    if (pageIndex < 0 || pageSize < 1) {
        throw new RangeError(`bad page ${pageIndex} size ${pageSize}`);
    }
    return { offset: pageIndex * pageSize, limit: pageSize };
}
export function pageCount(total, pageSize) {
    return Math.max(1, Math.ceil(total / pageSize));
}
export function clampPageIndex(pageIndex, total, pageSize) {
    return Math.min(Math.max(0, pageIndex), pageCount(total, pageSize) - 1);
}
