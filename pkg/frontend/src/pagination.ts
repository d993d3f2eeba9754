/** Offset-based pagination mirroring the server's offset/limit API. */

export interface PageRequest {
  offset: number;
  limit: number;
}

export function pageRequest(pageIndex: number, pageSize: number): PageRequest {
  if (pageIndex < 0 || pageSize < 1) {
    throw new RangeError(`bad page ${pageIndex} size ${pageSize}`);
  }
  return { offset: pageIndex * pageSize, limit: pageSize };
}

export function pageCount(total: number, pageSize: number): number {
  return Math.max(1, Math.ceil(total / pageSize));
}

export function clampPageIndex(pageIndex: number, total: number, pageSize: number): number {
  return Math.min(Math.max(0, pageIndex), pageCount(total, pageSize) - 1);
}
