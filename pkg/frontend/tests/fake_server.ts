// Scripted fetch fixture: a tiny in-memory stand-in for the daemon's /api
// endpoints, plus a call log so tests can assert what went over the wire.

import type { Category, ListEntry, MergeReportJson, Product } from '../src/api.js'

export interface Call {
  method: string
  url: string
  body: any
}

export class FakeServer {
  categories: Category[] = []
  products: Product[] = []
  list: ListEntry[] = []
  syncReport: MergeReportJson = { applied_local: 0, applied_remote: 0, conflicts: [] }
  syncError: { status: number; error: string; detail: string } | null = null
  failNextCheck = false
  offline = false
  calls: Call[] = []
  private nextId = 1

  seedProduct(name: string, price: string, favorite: boolean): Product {
    const p: Product = {
      id: this.nextId++,
      category_id: null,
      name,
      price,
      is_favorite: favorite,
    }
    this.products.push(p)
    return p
  }

  seedListEntry(product: Product, bought = false): ListEntry {
    const e: ListEntry = {
      id: this.nextId++,
      product_id: product.id,
      bought,
      display_color: bought ? 'green' : 'red',
      added_at: this.nextId,
      product_name: product.name,
      price: product.price,
    }
    this.list.push(e)
    return e
  }

  fetch = async (url: string, init?: RequestInit): Promise<Response> => {
    const method = init?.method ?? 'GET'
    const body = init?.body ? JSON.parse(init.body as string) : undefined
    this.calls.push({ method, url, body })
    if (this.offline) throw new TypeError('fetch failed')
    return this.route(method, url, body)
  }

  private json(data: unknown, status = 200): Response {
    return new Response(JSON.stringify(data), {
      status,
      headers: { 'content-type': 'application/json' },
    })
  }

  private route(method: string, url: string, body: any): Response {
    const path = url.split('?')[0]!
    if (method === 'GET' && path === '/api/categories') return this.json(this.categories)
    if (method === 'POST' && path === '/api/categories') {
      if (this.categories.some((c) => c.name.toLowerCase() === body.name.toLowerCase())) {
        return this.json({ error: 'DuplicateCategory', detail: body.name }, 409)
      }
      const cat = { id: this.nextId++, name: body.name }
      this.categories.push(cat)
      return this.json(cat, 201)
    }
    if (method === 'GET' && path === '/api/products') {
      const favs = url.includes('favorites=true')
      return this.json(favs ? this.products.filter((p) => p.is_favorite) : this.products)
    }
    if (method === 'POST' && path === '/api/products') {
      if (Number(body.price) < 0 || Number.isNaN(Number(body.price))) {
        return this.json({ error: 'InvalidPrice', detail: body.price }, 422)
      }
      const p = this.seedProduct(body.name, body.price, body.favorite ?? false)
      p.category_id = body.category_id ?? null
      return this.json(p, 201)
    }
    if (method === 'GET' && path === '/api/list') return this.json(this.list)
    if (method === 'POST' && path === '/api/list') {
      const prod = this.products.find((p) => p.id === body.product_id)
      if (!prod) return this.json({ error: 'UnknownProduct', detail: '' }, 404)
      return this.json(this.seedListEntry(prod), 201)
    }
    if (method === 'POST' && path === '/api/list/new') {
      const cleared = this.list.length
      this.list = []
      return this.json({ cleared })
    }
    const check = path.match(/^\/api\/list\/(\d+)\/check$/)
    if (method === 'PATCH' && check) {
      if (this.failNextCheck) {
        this.failNextCheck = false
        return this.json({ error: 'IoFailure', detail: 'disk error' }, 500)
      }
      const entry = this.list.find((e) => e.id === Number(check[1]))
      if (!entry) return this.json({ error: 'UnknownItem', detail: check[1]! }, 404)
      entry.bought = !entry.bought
      entry.display_color = entry.bought ? 'green' : 'red'
      return this.json({ id: entry.id, bought: entry.bought, display_color: entry.display_color })
    }
    if (method === 'POST' && path === '/api/sync') {
      if (this.syncError) return this.json(this.syncError, this.syncError.status)
      return this.json(this.syncReport)
    }
    return this.json({ error: 'NotFound', detail: path }, 404)
  }
}
