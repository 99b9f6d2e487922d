// Thin fetch client for the shoplist daemon's /api endpoints.
// The fetch function is injectable so tests can script responses.

export interface Category {
  id: number
  name: string
}

export interface Product {
  id: number
  category_id: number | null
  name: string
  price: string
  is_favorite: boolean
}

export interface ListEntry {
  id: number
  product_id: number
  bought: boolean
  display_color: string
  added_at: number
  product_name: string
  price: string
}

export interface MergeReportJson {
  applied_local: number
  applied_remote: number
  conflicts: { table: string; pk: number; winner_replica: string; policy: string }[]
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public errorName: string,
    public detail: string,
  ) {
    super(`${errorName}: ${detail}`)
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>

export class ApiClient {
  constructor(
    private base: string = '',
    private fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method }
    if (body !== undefined) {
      init.body = JSON.stringify(body)
      init.headers = { 'content-type': 'application/json' }
    }
    const resp = await this.fetchFn(this.base + path, init)
    let data: any = null
    try {
      data = await resp.json()
    } catch {
      // error responses without a body fall through below
    }
    if (!resp.ok) {
      const name = data?.error ?? `HTTP${resp.status}`
      throw new ApiError(resp.status, name, data?.detail ?? 'request failed')
    }
    return data as T
  }

  getCategories(): Promise<Category[]> {
    return this.request('GET', '/api/categories')
  }

  addCategory(name: string): Promise<Category> {
    return this.request('POST', '/api/categories', { name })
  }

  getProducts(opts: { categoryId?: number; favorites?: boolean } = {}): Promise<Product[]> {
    const params = new URLSearchParams()
    if (opts.categoryId !== undefined) params.set('category_id', String(opts.categoryId))
    if (opts.favorites) params.set('favorites', 'true')
    const qs = params.toString()
    return this.request('GET', '/api/products' + (qs ? '?' + qs : ''))
  }

  addProduct(p: {
    name: string
    price: string
    category_id?: number | null
    favorite?: boolean
  }): Promise<Product> {
    return this.request('POST', '/api/products', p)
  }

  setFavorite(productId: number, favorite: boolean): Promise<Product> {
    return this.request('PATCH', `/api/products/${productId}/favorite`, { favorite })
  }

  getList(): Promise<ListEntry[]> {
    return this.request('GET', '/api/list')
  }

  addToList(productId: number): Promise<ListEntry> {
    return this.request('POST', '/api/list', { product_id: productId })
  }

  checkItem(itemId: number): Promise<{ id: number; bought: boolean; display_color: string }> {
    return this.request('PATCH', `/api/list/${itemId}/check`)
  }

  newList(): Promise<{ cleared: number }> {
    return this.request('POST', '/api/list/new')
  }

  sync(remote: string, policy?: string): Promise<MergeReportJson> {
    return this.request('POST', '/api/sync', { remote, policy })
  }
}
